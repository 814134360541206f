// @vitest-environment jsdom
import { describe, expect, it } from 'vitest';

import type { ApiClient } from '../src/api.js';
import { ReviewQueue } from '../src/queue.js';
import { renderItem, renderQueue, renderStats } from '../src/render.js';
import { FakeApi, makeItem } from './helpers.js';

describe('renderItem', () => {
  it('shows both relations, meta relation, and evidence side by side', () => {
    const view = { item: makeItem('chief executive officer', 'head of state'), selectedVerdict: null, submitting: false, error: null };
    const card = renderItem(view, true);

    const labels = [...card.querySelectorAll('.rel-label')].map((n) => n.textContent);
    expect(labels).toEqual(['chief executive officer', 'head of state']);
    expect(card.querySelector('.meta-relation')?.textContent).toBe('created by');

    const columns = card.querySelectorAll('.evidence-column');
    expect(columns.length).toBe(2);
    expect(columns[0].textContent).toContain('Tim Cook : Apple');
    expect(columns[1].textContent).toContain('Joe Biden : USA');
    expect(card.classList.contains('focused')).toBe(true);
  });

  it('badges human-added pairs and shows the server status', () => {
    const item = makeItem('a', 'b', 'approved');
    item.pair.provenance = 'human_added';
    const card = renderItem({ item, selectedVerdict: null, submitting: false, error: null }, false);
    expect(card.querySelector('.provenance-badge')?.textContent).toBe('human added');
    expect(card.querySelector('.status-chip')?.textContent).toBe('approved');
  });

  it('renders a retry affordance on submit errors', () => {
    const view = { item: makeItem('a', 'b'), selectedVerdict: 'accept' as const, submitting: false, error: 'submit failed, retry' };
    const card = renderItem(view, false);
    expect(card.querySelector('.item-error-text')?.textContent).toContain('submit failed');
    expect(card.querySelector('[data-action="retry"]')).not.toBeNull();
  });
});

describe('renderQueue', () => {
  it('shows the empty state when nothing is pending', async () => {
    const api = new FakeApi();
    const queue = new ReviewQueue(api as unknown as ApiClient, 'ann1');
    await queue.loadPage();
    const root = document.createElement('div');
    renderQueue(root, queue);
    expect(root.querySelector('.empty-state')?.textContent).toBe('no pending items');
  });

  it('paginates a 103-item queue at 20 per page across 6 pages', async () => {
    const api = new FakeApi();
    for (let i = 0; i < 103; i++) api.items.push(makeItem(`a${i}`, `b${i}`));
    const queue = new ReviewQueue(api as unknown as ApiClient, 'ann1');
    await queue.loadPage();
    const root = document.createElement('div');
    renderQueue(root, queue);
    expect(root.querySelectorAll('.review-item').length).toBe(20);
    expect(root.querySelector('.pager')?.textContent).toBe('page 1 of 6');
  });

  it('shows the banner without hiding the queue', async () => {
    const api = new FakeApi();
    api.items.push(makeItem('a', 'b'));
    const queue = new ReviewQueue(api as unknown as ApiClient, 'ann1');
    await queue.loadPage();
    queue.banner = 'API unreachable';
    const root = document.createElement('div');
    renderQueue(root, queue);
    expect(root.querySelector('.banner')?.textContent).toBe('API unreachable');
    expect(root.querySelectorAll('.review-item').length).toBe(1);
  });
});

describe('renderStats', () => {
  it('shows every count and the kappa from the server', () => {
    const root = document.createElement('div');
    renderStats(root, {
      counts: { pending: 3, approved: 2, rejected: 1, conflict: 0 },
      total: 6,
      fleiss_kappa: 0.25
    });
    expect(root.textContent).toContain('pending: 3');
    expect(root.textContent).toContain('approved: 2');
    expect(root.textContent).toContain('total: 6');
    expect(root.textContent).toContain('kappa: 0.250');
  });

  it('renders kappa as n/a when the server has none', () => {
    const root = document.createElement('div');
    renderStats(root, {
      counts: { pending: 0, approved: 0, rejected: 0, conflict: 0 },
      total: 0,
      fleiss_kappa: null
    });
    expect(root.textContent).toContain('kappa: n/a');
  });
});

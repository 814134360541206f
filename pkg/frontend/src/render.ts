import { ReviewQueue } from './queue.js';
import type { ConceptPair, ReviewItemView, Stats } from './types.js';

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function evidenceList(label: string, pairs: ConceptPair[]): HTMLElement {
  const column = el('div', 'evidence-column');
  column.appendChild(el('h4', 'evidence-label', label));
  const list = el('ul', 'evidence-list');
  for (const pair of pairs) {
    list.appendChild(el('li', 'evidence-pair', `${pair.subject} : ${pair.object}`));
  }
  column.appendChild(list);
  return column;
}

export function renderItem(view: ReviewItemView, focused: boolean): HTMLElement {
  const { item } = view;
  const card = el('article', `review-item${focused ? ' focused' : ''}`);
  card.dataset.itemId = item.item_id;

  const header = el('header', 'item-header');
  header.appendChild(el('span', 'rel-label', item.pair.rel_a));
  header.appendChild(el('span', 'rel-sep', '~'));
  header.appendChild(el('span', 'rel-label', item.pair.rel_b));
  if (item.pair.meta_relation) {
    header.appendChild(el('span', 'meta-relation', item.pair.meta_relation));
  }
  header.appendChild(el('span', `status-chip status-${item.status}`, item.status));
  if (item.pair.provenance === 'human_added') {
    header.appendChild(el('span', 'provenance-badge', 'human added'));
  }
  card.appendChild(header);

  const evidence = el('div', 'evidence');
  evidence.appendChild(evidenceList(item.pair.rel_a, item.sample_pairs_a));
  evidence.appendChild(evidenceList(item.pair.rel_b, item.sample_pairs_b));
  card.appendChild(evidence);

  if (view.error) {
    const row = el('div', 'item-error');
    row.appendChild(el('span', 'item-error-text', view.error));
    const retry = el('button', 'retry-button', 'retry') as HTMLButtonElement;
    retry.dataset.action = 'retry';
    row.appendChild(retry);
    card.appendChild(row);
  }
  return card;
}

export function renderQueue(container: HTMLElement, queue: ReviewQueue): void {
  container.replaceChildren();
  if (queue.banner) {
    container.appendChild(el('div', 'banner', queue.banner));
  }
  if (queue.views.length === 0) {
    container.appendChild(el('div', 'empty-state', 'no pending items'));
    return;
  }
  for (let i = 0; i < queue.views.length; i++) {
    container.appendChild(renderItem(queue.views[i], i === queue.focusIndex));
  }
  if (queue.pageCount > 1) {
    container.appendChild(
      el('div', 'pager', `page ${queue.currentPage} of ${queue.pageCount}`)
    );
  }
}

export function renderStats(container: HTMLElement, stats: Stats): void {
  container.replaceChildren();
  for (const [status, count] of Object.entries(stats.counts)) {
    container.appendChild(el('span', `stat stat-${status}`, `${status}: ${count}`));
  }
  container.appendChild(el('span', 'stat stat-total', `total: ${stats.total}`));
  const kappa = stats.fleiss_kappa === null ? 'n/a' : stats.fleiss_kappa.toFixed(3);
  container.appendChild(el('span', 'stat stat-kappa', `kappa: ${kappa}`));
}

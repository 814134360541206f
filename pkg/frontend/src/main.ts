import { AddPairDialog } from './addPair.js';
import { ApiClient } from './api.js';
import { ReviewQueue } from './queue.js';
import { renderQueue, renderStats } from './render.js';

const STATS_POLL_MS = 5000;

async function boot(): Promise<void> {
  const api = new ApiClient();
  const queueRoot = document.getElementById('queue')!;
  const statsRoot = document.getElementById('stats')!;
  const annotatorSelect = document.getElementById('annotator') as HTMLSelectElement;
  const searchInput = document.getElementById('pair-search') as HTMLInputElement;
  const searchResults = document.getElementById('pair-results')!;

  const annotators = await api.fetchAnnotators();
  for (const name of annotators) {
    const option = document.createElement('option');
    option.value = name;
    option.textContent = name;
    annotatorSelect.appendChild(option);
  }

  let queue = new ReviewQueue(api, annotators[0], 20, () => renderQueue(queueRoot, queue));
  let dialog = new AddPairDialog(api, annotators[0]);
  annotatorSelect.addEventListener('change', () => {
    queue = new ReviewQueue(api, annotatorSelect.value, 20, () => renderQueue(queueRoot, queue));
    dialog = new AddPairDialog(api, annotatorSelect.value);
    void queue.loadPage();
    void dialog.load();
  });

  document.addEventListener('keydown', (event) => {
    if (event.target instanceof HTMLInputElement || event.target instanceof HTMLSelectElement) return;
    queue.handleKey(event.key);
  });

  queueRoot.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action === 'retry' && queue.focused?.selectedVerdict) {
      void queue.submit(queue.focused.selectedVerdict);
    }
  });

  searchInput.addEventListener('input', () => {
    searchResults.replaceChildren();
    for (const match of dialog.search(searchInput.value)) {
      const button = document.createElement('button');
      button.className = 'pair-result';
      button.textContent = `${match.relA}  +  ${match.relB}`;
      button.addEventListener('click', async () => {
        try {
          await dialog.submit(match.relA, match.relB);
          await queue.loadPage(queue.cursor);
        } catch {
          searchResults.prepend(
            Object.assign(document.createElement('div'), {
              className: 'banner',
              textContent: dialog.lastError ?? 'add failed'
            })
          );
        }
      });
      searchResults.appendChild(button);
    }
  });

  const pollStats = async () => {
    try {
      renderStats(statsRoot, await api.fetchStats());
    } catch {
      // leave the last good numbers on screen
    }
  };

  await Promise.all([queue.loadPage(), dialog.load(), pollStats()]);
  setInterval(pollStats, STATS_POLL_MS);
}

void boot();

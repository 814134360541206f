import { ApiClient, ApiRequestError } from './api.js';
import type { ReviewItem, ReviewItemView, Verdict } from './types.js';

export const PAGE_SIZE = 20;

function toView(item: ReviewItem): ReviewItemView {
  return { item, selectedVerdict: null, submitting: false, error: null };
}

/** Client-side queue state. All statuses come from server responses; the queue
 * never derives one locally. */
export class ReviewQueue {
  views: ReviewItemView[] = [];
  focusIndex = 0;
  cursor = 0;
  nextCursor: number | null = null;
  totalPending = 0;
  banner: string | null = null;

  constructor(
    private readonly api: ApiClient,
    readonly annotator: string,
    readonly pageSize: number = PAGE_SIZE,
    private readonly onChange: () => void = () => {}
  ) {}

  get pageCount(): number {
    return Math.ceil(this.totalPending / this.pageSize);
  }

  get currentPage(): number {
    return Math.floor(this.cursor / this.pageSize) + 1;
  }

  get focused(): ReviewItemView | null {
    return this.views[this.focusIndex] ?? null;
  }

  async loadPage(cursor = 0): Promise<void> {
    try {
      const page = await this.api.fetchPending(cursor, this.pageSize);
      this.views = page.items.map(toView);
      this.cursor = cursor;
      this.nextCursor = page.next_cursor;
      this.totalPending = page.total_pending;
      this.focusIndex = 0;
      this.banner = null;
    } catch (e) {
      // queue stays navigable; surface the failure without wiping state
      this.banner = e instanceof Error ? e.message : 'failed to load queue';
    }
    this.onChange();
  }

  async nextPage(): Promise<void> {
    if (this.nextCursor !== null) await this.loadPage(this.nextCursor);
  }

  async prevPage(): Promise<void> {
    if (this.cursor > 0) await this.loadPage(Math.max(0, this.cursor - this.pageSize));
  }

  focusNext(): void {
    if (this.focusIndex < this.views.length - 1) {
      this.focusIndex += 1;
      this.onChange();
    }
  }

  focusPrev(): void {
    if (this.focusIndex > 0) {
      this.focusIndex -= 1;
      this.onChange();
    }
  }

  async submit(verdict: Verdict): Promise<void> {
    const view = this.focused;
    if (!view || view.submitting) return;
    const previous = view.selectedVerdict;
    view.selectedVerdict = verdict;
    view.submitting = true;
    view.error = null;
    this.onChange();
    try {
      view.item = await this.api.submitDecision(view.item.item_id, this.annotator, verdict);
      view.submitting = false;
      if (view.item.status !== 'pending') this.advancePastFocused();
    } catch (e) {
      view.submitting = false;
      view.selectedVerdict = previous;
      view.error = e instanceof ApiRequestError ? e.message : 'submit failed, retry';
    }
    this.onChange();
  }

  /** After a resolved item, move focus to the next still-pending one. */
  private advancePastFocused(): void {
    for (let i = this.focusIndex + 1; i < this.views.length; i++) {
      if (this.views[i].item.status === 'pending') {
        this.focusIndex = i;
        return;
      }
    }
  }

  handleKey(key: string): void {
    switch (key) {
      case 'a':
        void this.submit('accept');
        break;
      case 'r':
        void this.submit('reject');
        break;
      case 'j':
      case 'ArrowDown':
        this.focusNext();
        break;
      case 'k':
      case 'ArrowUp':
        this.focusPrev();
        break;
    }
  }
}

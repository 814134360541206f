import type { PendingPage, ReviewItem, Status, Verdict } from '../src/types.js';

export function makeItem(relA: string, relB: string, status: Status = 'pending'): ReviewItem {
  return {
    item_id: `${relA}||${relB}`,
    pair: { rel_a: relA, rel_b: relB, meta_relation: 'created by', provenance: 'auto', status: 'pending' },
    sample_pairs_a: [{ subject: 'Tim Cook', object: 'Apple', popularity: 900000 }],
    sample_pairs_b: [{ subject: 'Joe Biden', object: 'USA', popularity: 950000 }],
    decisions: [],
    status,
    missing_evidence: false
  };
}

/** In-memory stand-in for ApiClient, enough for queue and dialog tests. */
export class FakeApi {
  items: ReviewItem[] = [];
  candidateSets: Record<string, string[]> = {};
  failSubmitWith: { code: string; message: string } | null = null;
  submitted: Array<{ itemId: string; annotator: string; verdict: Verdict }> = [];

  async fetchPending(cursor = 0, limit = 20): Promise<PendingPage> {
    const pending = this.items.filter((i) => i.status === 'pending');
    const page = pending.slice(cursor, cursor + limit);
    return {
      items: page,
      total_pending: pending.length,
      next_cursor: cursor + limit < pending.length ? cursor + limit : null
    };
  }

  async submitDecision(itemId: string, annotator: string, verdict: Verdict): Promise<ReviewItem> {
    if (this.failSubmitWith) {
      const err = this.failSubmitWith;
      throw Object.assign(new Error(err.message), { code: err.code });
    }
    this.submitted.push({ itemId, annotator, verdict });
    const item = this.items.find((i) => i.item_id === itemId);
    if (!item) throw new Error(`unknown item ${itemId}`);
    // second accept approves, mimicking the server's two-accept policy
    const accepts = this.submitted.filter((s) => s.itemId === itemId && s.verdict === 'accept').length;
    const status: Status = verdict === 'accept' && accepts >= 2 ? 'approved' : item.status;
    const updated = { ...item, status };
    Object.assign(item, updated);
    return updated;
  }

  async addPair(relA: string, relB: string, annotator: string): Promise<ReviewItem> {
    void annotator;
    const item = makeItem(relA, relB);
    item.pair.provenance = 'human_added';
    this.items.push(item);
    return item;
  }

  async fetchCandidates(): Promise<Record<string, string[]>> {
    return this.candidateSets;
  }
}

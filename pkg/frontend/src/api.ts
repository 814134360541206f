import type { PendingPage, RelationSummary, ReviewItem, Stats, Verdict } from './types.js';

export class ApiRequestError extends Error {
  constructor(readonly code: string, message: string, readonly status: number) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    const err = body as { code?: string; message?: string };
    throw new ApiRequestError(err.code ?? 'unknown', err.message ?? response.statusText, response.status);
  }
  return body as T;
}

export class ApiClient {
  constructor(private readonly base: string = '') {}

  async fetchPending(cursor = 0, limit = 20): Promise<PendingPage> {
    const resp = await fetch(`${this.base}/api/review/pending?cursor=${cursor}&limit=${limit}`);
    return asJson<PendingPage>(resp);
  }

  async fetchItem(itemId: string): Promise<ReviewItem> {
    const resp = await fetch(`${this.base}/api/review/items/${encodeURI(itemId)}`);
    return asJson<ReviewItem>(resp);
  }

  async submitDecision(itemId: string, annotator: string, verdict: Verdict, note?: string): Promise<ReviewItem> {
    const resp = await fetch(`${this.base}/api/review/items/${encodeURI(itemId)}/decision`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ annotator, verdict, note })
    });
    return asJson<ReviewItem>(resp);
  }

  async addPair(relA: string, relB: string, annotator: string): Promise<ReviewItem> {
    const resp = await fetch(`${this.base}/api/review/add`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ rel_a: relA, rel_b: relB, annotator })
    });
    return asJson<ReviewItem>(resp);
  }

  async fetchStats(): Promise<Stats> {
    const resp = await fetch(`${this.base}/api/review/stats`);
    return asJson<Stats>(resp);
  }

  async fetchAnnotators(): Promise<string[]> {
    const resp = await fetch(`${this.base}/api/review/annotators`);
    const body = await asJson<{ annotators: string[] }>(resp);
    return body.annotators;
  }

  async fetchCandidates(): Promise<Record<string, string[]>> {
    const resp = await fetch(`${this.base}/api/review/candidates`);
    const body = await asJson<{ candidate_sets: Record<string, string[]> }>(resp);
    return body.candidate_sets;
  }

  async fetchRelations(): Promise<RelationSummary[]> {
    const resp = await fetch(`${this.base}/api/kb/relations`);
    const body = await asJson<{ relations: RelationSummary[] }>(resp);
    return body.relations;
  }
}

import { ApiClient } from './api.js';
import type { ReviewItem } from './types.js';

export interface CandidateMatch {
  relA: string;
  relB: string;
}

/** Add-pair dialog state. Mirrors the server gate: only pairs present in the
 * loaded candidate sets are offerable at all. */
export class AddPairDialog {
  candidateSets: Record<string, string[]> = {};
  lastError: string | null = null;

  constructor(private readonly api: ApiClient, private readonly annotator: string) {}

  async load(): Promise<void> {
    this.candidateSets = await this.api.fetchCandidates();
  }

  /** Substring search over all offerable pairs, case-insensitive. */
  search(query: string, limit = 20): CandidateMatch[] {
    const needle = query.trim().toLowerCase();
    const matches: CandidateMatch[] = [];
    const seen = new Set<string>();
    for (const [relA, candidates] of Object.entries(this.candidateSets)) {
      for (const relB of candidates) {
        const [a, b] = relA < relB ? [relA, relB] : [relB, relA];
        const key = `${a}||${b}`;
        if (seen.has(key)) continue;
        if (!needle || a.toLowerCase().includes(needle) || b.toLowerCase().includes(needle)) {
          seen.add(key);
          matches.push({ relA: a, relB: b });
          if (matches.length >= limit) return matches;
        }
      }
    }
    return matches;
  }

  isOfferable(relA: string, relB: string): boolean {
    return (
      (this.candidateSets[relA] ?? []).includes(relB) ||
      (this.candidateSets[relB] ?? []).includes(relA)
    );
  }

  async submit(relA: string, relB: string): Promise<ReviewItem> {
    if (!this.isOfferable(relA, relB)) {
      this.lastError = `${relA} / ${relB} is not in the candidate sets`;
      throw new Error(this.lastError);
    }
    try {
      const item = await this.api.addPair(relA, relB, this.annotator);
      this.lastError = null;
      return item;
    } catch (e) {
      this.lastError = e instanceof Error ? e.message : 'add failed';
      throw e;
    }
  }
}

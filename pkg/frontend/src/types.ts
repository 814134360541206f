export type Verdict = 'accept' | 'reject';

export type Status = 'pending' | 'approved' | 'rejected' | 'conflict';

export interface ConceptPair {
  subject: string;
  object: string;
  popularity: number;
}

export interface RelationPair {
  rel_a: string;
  rel_b: string;
  meta_relation: string | null;
  provenance: string;
  status: string;
}

export interface Decision {
  annotator: string;
  verdict: Verdict;
  note: string;
  timestamp: string;
}

export interface ReviewItem {
  item_id: string;
  pair: RelationPair;
  sample_pairs_a: ConceptPair[];
  sample_pairs_b: ConceptPair[];
  decisions: Decision[];
  status: Status;
  missing_evidence: boolean;
}

export interface PendingPage {
  items: ReviewItem[];
  total_pending: number;
  next_cursor: number | null;
}

export interface Stats {
  counts: Record<Status, number>;
  total: number;
  fleiss_kappa: number | null;
}

export interface RelationSummary {
  id: string;
  label: string;
  source: string;
  pair_count: number;
}

/** ReviewItem plus client-side submission state. Status is never computed
 * locally; while a submit is in flight the item is only marked busy, and the
 * server's response replaces it wholesale. */
export interface ReviewItemView {
  item: ReviewItem;
  selectedVerdict: Verdict | null;
  submitting: boolean;
  error: string | null;
}

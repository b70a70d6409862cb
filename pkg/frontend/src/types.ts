/** Response shapes of the fieldbase HTTP API, mirrored field for field. */

/** A value the server computed exactly, with a display rounding. */
export interface ExactValue {
  exact: string;
  decimal: string;
}

export interface FieldRow {
  id: string;
  degree: number;
  rd: ExactValue;
  /** null when the record has no Galois root discriminant data */
  grd: ExactValue | null;
  disc: string;
  /** decimal digits; may exceed Number range, never parse it */
  absdisc: string;
  /** class column under the requested display; null when not recorded */
  h: string | null;
  group: string;
  t_name: string;
  s: number;
  poly: string;
  coefficients: number[];
  ramified_primes: number[];
}

export interface SearchResponse {
  complete: boolean;
  trace: string;
  total: number;
  rows: FieldRow[];
  grh_conditional?: boolean;
}

export interface FamilyCount {
  primes: number[];
  count: number;
  provable: boolean;
}

export interface GroupSummaryResponse {
  group: string;
  label: string;
  total_records: number;
  min_rd: ExactValue | null;
  min_grd: ExactValue | null;
  families: FamilyCount[];
  grd_below?: {
    cut: string;
    count: number;
    provable: boolean;
  };
}

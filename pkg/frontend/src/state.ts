/**
 * Search form state and its URL serialization.
 *
 * The state mirrors the /api/fields parameters one to one and round-trips
 * through a query string losslessly, so every search has a shareable URL.
 * Numeric values stay as digit strings; discriminants overflow doubles and
 * the server does all arithmetic anyway.
 */

export type SortKey = "rd" | "grd" | "absdisc";
export type ClassDisplay = "class" | "narrow";

export const SORT_KEYS: readonly SortKey[] = ["rd", "grd", "absdisc"];

/** One row of the ramification editor. */
export interface RamRow {
  pLo: string;
  /** null = a single prime rather than a range */
  pHi: string | null;
  eLo: string;
  /** null = no upper bound on the exponent */
  eHi: string | null;
  /** when true, fields where the prime does not ramify also match */
  allowZero: boolean;
}

export interface SearchFormState {
  degrees: string[];
  degreeMin: string | null;
  degreeMax: string | null;
  groups: string[];
  sValues: string[];
  absdiscMin: string | null;
  absdiscMax: string | null;
  rdMax: string | null;
  grdMin: string | null;
  grdMax: string | null;
  ram: RamRow[];
  onlyListed: boolean;
  maxPrime: string | null;
  sort: SortKey | null;
  display: ClassDisplay;
  limit: string | null;
  offset: string | null;
}

export function emptyState(): SearchFormState {
  return {
    degrees: [],
    degreeMin: null,
    degreeMax: null,
    groups: [],
    sValues: [],
    absdiscMin: null,
    absdiscMax: null,
    rdMax: null,
    grdMin: null,
    grdMax: null,
    ram: [],
    onlyListed: false,
    maxPrime: null,
    sort: null,
    display: "class",
    limit: null,
    offset: null,
  };
}

const DIGITS = /^[0-9]+$/;
/** bounds like 44.76 or 2223/343 */
const RATIONAL = /^[0-9]+(\.[0-9]+|\/[0-9]+)?$/;
const GROUP_LABEL = /^[0-9]+T[0-9]+$/;

export function isDigits(text: string): boolean {
  return DIGITS.test(text);
}

export function isRational(text: string): boolean {
  return RATIONAL.test(text);
}

export function isGroupLabel(text: string): boolean {
  return GROUP_LABEL.test(text);
}

/**
 * Canonical form of an editor row: an exponent minimum of 0 becomes
 * minimum 1 with the allow-zero flag set (same constraint, the parameter
 * format only knows the flag), and a one-prime range becomes the prime.
 * parseState only ever produces normalized rows, so state -> params ->
 * state is the identity on normalized states.
 */
export function normalizeRamRow(row: RamRow): RamRow {
  const pHi = row.pHi === row.pLo ? null : row.pHi;
  if (row.eLo === "0") {
    return { ...row, pHi, eLo: "1", allowZero: true };
  }
  return { ...row, pHi };
}

/**
 * Serialize one editor row to the ram parameter format: "229:1-1",
 * "3-5:1-2:z", "7:1-". An exponent minimum of 0 means the prime may be
 * absent, which the parameter expresses as minimum 1 plus the z flag.
 */
export function ramParam(row: RamRow): string {
  const r = normalizeRamRow(row);
  const primes = r.pHi !== null ? `${r.pLo}-${r.pHi}` : r.pLo;
  const exponents = `${r.eLo}-${r.eHi ?? ""}`;
  return r.allowZero ? `${primes}:${exponents}:z` : `${primes}:${exponents}`;
}

function parseSpan(text: string): [string, string | null] | null {
  const dash = text.indexOf("-");
  if (dash < 0) {
    return isDigits(text) ? [text, text] : null;
  }
  const lo = text.slice(0, dash);
  const hi = text.slice(dash + 1);
  if (!isDigits(lo)) return null;
  if (hi === "") return [lo, null];
  return isDigits(hi) ? [lo, hi] : null;
}

/** Inverse of ramParam; also accepts the short forms the server takes. */
export function parseRamParam(text: string): RamRow | null {
  const parts = text.split(":");
  let allowZero = false;
  if (parts.length === 3 && parts[2] === "z") {
    allowZero = true;
    parts.pop();
  }
  if (parts.length !== 2 || !parts[0] || !parts[1]) return null;
  const primes = parseSpan(parts[0]!);
  const exponents = parseSpan(parts[1]!);
  if (primes === null || exponents === null) return null;
  const [pLo, pHiRaw] = primes;
  const [eLo, eHi] = exponents;
  // a one-prime "range" is the same constraint as the single prime
  const pHi = pHiRaw === pLo ? null : pHiRaw;
  return { pLo, pHi, eLo, eHi, allowZero };
}

/** Human-readable reason a row cannot be serialized, or null if it can. */
export function ramRowProblem(row: RamRow): string | null {
  if (!isDigits(row.pLo)) return "prime must be a number";
  if (row.pHi !== null && !isDigits(row.pHi)) return "prime range end must be a number";
  if (!isDigits(row.eLo)) return "exponent must be a number";
  if (row.eHi !== null && !isDigits(row.eHi)) return "exponent range end must be a number";
  if (row.eHi !== null && BigInt(row.eHi) < 1n) return "exponent range end must be at least 1";
  if (row.eHi !== null && BigInt(row.eLo === "0" ? "1" : row.eLo) > BigInt(row.eHi)) {
    return "empty exponent range";
  }
  if (row.pHi !== null && BigInt(row.pLo) > BigInt(row.pHi)) return "empty prime range";
  return null;
}

export function serializeState(state: SearchFormState): URLSearchParams {
  const params = new URLSearchParams();
  for (const d of state.degrees) params.append("degree", d);
  if (state.degreeMin !== null) params.set("degree_min", state.degreeMin);
  if (state.degreeMax !== null) params.set("degree_max", state.degreeMax);
  for (const g of state.groups) params.append("group", g);
  for (const s of state.sValues) params.append("s", s);
  if (state.absdiscMin !== null) params.set("absdisc_min", state.absdiscMin);
  if (state.absdiscMax !== null) params.set("absdisc_max", state.absdiscMax);
  if (state.rdMax !== null) params.set("rd_max", state.rdMax);
  if (state.grdMin !== null) params.set("grd_min", state.grdMin);
  if (state.grdMax !== null) params.set("grd_max", state.grdMax);
  for (const row of state.ram) params.append("ram", ramParam(row));
  if (state.onlyListed) params.set("only_listed", "1");
  if (state.maxPrime !== null) params.set("max_prime", state.maxPrime);
  if (state.sort !== null) params.set("sort", state.sort);
  if (state.display !== "class") params.set("display", state.display);
  if (state.limit !== null) params.set("limit", state.limit);
  if (state.offset !== null) params.set("offset", state.offset);
  return params;
}

function first(params: URLSearchParams, name: string, valid: (v: string) => boolean): string | null {
  const value = params.get(name);
  return value !== null && valid(value) ? value : null;
}

/**
 * Rebuild form state from a query string. Entries that do not parse are
 * dropped rather than rejected; a hand-edited URL still loads a usable form.
 */
export function parseState(params: URLSearchParams): SearchFormState {
  const state = emptyState();
  state.degrees = params.getAll("degree").filter(isDigits);
  state.degreeMin = first(params, "degree_min", isDigits);
  state.degreeMax = first(params, "degree_max", isDigits);
  state.groups = params.getAll("group").filter(isGroupLabel);
  state.sValues = params.getAll("s").filter(isDigits);
  state.absdiscMin = first(params, "absdisc_min", isDigits);
  state.absdiscMax = first(params, "absdisc_max", isDigits);
  state.rdMax = first(params, "rd_max", isRational);
  state.grdMin = first(params, "grd_min", isRational);
  state.grdMax = first(params, "grd_max", isRational);
  for (const text of params.getAll("ram")) {
    const row = parseRamParam(text);
    if (row !== null) state.ram.push(row);
  }
  state.onlyListed = params.get("only_listed") === "1";
  state.maxPrime = first(params, "max_prime", isDigits);
  const sort = params.get("sort");
  state.sort = sort !== null && (SORT_KEYS as readonly string[]).includes(sort) ? (sort as SortKey) : null;
  state.display = params.get("display") === "narrow" ? "narrow" : "class";
  state.limit = first(params, "limit", isDigits);
  state.offset = first(params, "offset", isDigits);
  return state;
}

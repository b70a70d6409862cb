/**
 * Page wiring: form <-> state <-> URL <-> API. The query string is the
 * single source of truth for a search, so every result page has a
 * shareable address and back/forward replays earlier searches.
 */

import { ApiError, fetchSummary, isAbort, searchFields } from "./api.js";
import { renderError, renderResults, renderSummary } from "./render.js";
import {
  SearchFormState,
  RamRow,
  SORT_KEYS,
  SortKey,
  emptyState,
  isDigits,
  isGroupLabel,
  isRational,
  normalizeRamRow,
  parseState,
  ramRowProblem,
  serializeState,
} from "./state.js";

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function inputValue(id: string): string {
  return el<HTMLInputElement>(id).value.trim();
}

function splitList(text: string): string[] {
  return text.split(/[\s,]+/).filter((part) => part.length > 0);
}

// -- ramification editor ------------------------------------------------------

function addRamRow(row?: RamRow): void {
  const div = document.createElement("div");
  div.className = "ram-row";
  div.innerHTML =
    'prime <input type="text" class="ram-plo">' +
    '&ndash; <input type="text" class="ram-phi" placeholder="(single)">' +
    'exponent <input type="text" class="ram-elo" value="1">' +
    '&ndash; <input type="text" class="ram-ehi" placeholder="(unbounded)">' +
    '<label><input type="checkbox" class="ram-z"> may be absent</label>' +
    '<button type="button" class="ram-remove">remove</button>';
  if (row !== undefined) {
    div.querySelector<HTMLInputElement>(".ram-plo")!.value = row.pLo;
    div.querySelector<HTMLInputElement>(".ram-phi")!.value = row.pHi ?? "";
    div.querySelector<HTMLInputElement>(".ram-elo")!.value = row.eLo;
    div.querySelector<HTMLInputElement>(".ram-ehi")!.value = row.eHi ?? "";
    div.querySelector<HTMLInputElement>(".ram-z")!.checked = row.allowZero;
  }
  div.querySelector(".ram-remove")!.addEventListener("click", () => div.remove());
  el("ram-rows").appendChild(div);
}

function readRamRows(problems: string[]): RamRow[] {
  const rows: RamRow[] = [];
  for (const div of document.querySelectorAll<HTMLElement>("#ram-rows .ram-row")) {
    const value = (cls: string) =>
      div.querySelector<HTMLInputElement>("." + cls)!.value.trim();
    const row: RamRow = {
      pLo: value("ram-plo"),
      pHi: value("ram-phi") || null,
      eLo: value("ram-elo"),
      eHi: value("ram-ehi") || null,
      allowZero: div.querySelector<HTMLInputElement>(".ram-z")!.checked,
    };
    if (row.pLo === "" && row.pHi === null) {
      div.classList.remove("invalid");
      continue;
    }
    const problem = ramRowProblem(row);
    div.classList.toggle("invalid", problem !== null);
    if (problem !== null) {
      problems.push(`prime constraint: ${problem}`);
    } else {
      rows.push(normalizeRamRow(row));
    }
  }
  return rows;
}

// -- form <-> state -----------------------------------------------------------

function listField(
  id: string,
  label: string,
  valid: (v: string) => boolean,
  problems: string[],
): string[] {
  const parts = splitList(inputValue(id));
  const bad = parts.filter((p) => !valid(p));
  if (bad.length > 0) problems.push(`${label}: cannot read '${bad[0]}'`);
  return parts.filter(valid);
}

function scalarField(
  id: string,
  label: string,
  valid: (v: string) => boolean,
  problems: string[],
): string | null {
  const text = inputValue(id);
  if (text === "") return null;
  if (!valid(text)) {
    problems.push(`${label}: cannot read '${text}'`);
    return null;
  }
  return text;
}

function readForm(): { state: SearchFormState; problems: string[] } {
  const problems: string[] = [];
  const state = emptyState();
  state.degrees = listField("degree", "degrees", isDigits, problems);
  state.degreeMin = scalarField("degree-min", "degree range", isDigits, problems);
  state.degreeMax = scalarField("degree-max", "degree range", isDigits, problems);
  state.groups = listField("group", "groups", isGroupLabel, problems);
  state.sValues = listField("s", "complex places", isDigits, problems);
  state.absdiscMin = scalarField("absdisc-min", "|D| range", isDigits, problems);
  state.absdiscMax = scalarField("absdisc-max", "|D| range", isDigits, problems);
  state.rdMax = scalarField("rd-max", "rd bound", isRational, problems);
  state.grdMin = scalarField("grd-min", "grd range", isRational, problems);
  state.grdMax = scalarField("grd-max", "grd range", isRational, problems);
  state.ram = readRamRows(problems);
  state.onlyListed = el<HTMLInputElement>("only-listed").checked;
  if (state.onlyListed && state.ram.length === 0) {
    problems.push("'no other ramified primes' needs at least one prime constraint");
  }
  state.maxPrime = scalarField("max-prime", "largest prime", isDigits, problems);
  const sort = el<HTMLSelectElement>("sort").value;
  state.sort = (SORT_KEYS as readonly string[]).includes(sort) ? (sort as SortKey) : null;
  const narrow = document.querySelector<HTMLInputElement>('input[name="display"][value="narrow"]');
  state.display = narrow?.checked ? "narrow" : "class";
  state.limit = scalarField("limit", "limit", isDigits, problems);
  state.offset = scalarField("offset", "offset", isDigits, problems);
  return { state, problems };
}

function fillForm(state: SearchFormState): void {
  el<HTMLInputElement>("degree").value = state.degrees.join(" ");
  el<HTMLInputElement>("degree-min").value = state.degreeMin ?? "";
  el<HTMLInputElement>("degree-max").value = state.degreeMax ?? "";
  el<HTMLInputElement>("group").value = state.groups.join(" ");
  el<HTMLInputElement>("s").value = state.sValues.join(" ");
  el<HTMLInputElement>("absdisc-min").value = state.absdiscMin ?? "";
  el<HTMLInputElement>("absdisc-max").value = state.absdiscMax ?? "";
  el<HTMLInputElement>("rd-max").value = state.rdMax ?? "";
  el<HTMLInputElement>("grd-min").value = state.grdMin ?? "";
  el<HTMLInputElement>("grd-max").value = state.grdMax ?? "";
  el("ram-rows").replaceChildren();
  for (const row of state.ram) addRamRow(row);
  el<HTMLInputElement>("only-listed").checked = state.onlyListed;
  el<HTMLInputElement>("max-prime").value = state.maxPrime ?? "";
  el<HTMLSelectElement>("sort").value = state.sort ?? "";
  for (const radio of document.querySelectorAll<HTMLInputElement>('input[name="display"]')) {
    radio.checked = radio.value === state.display;
  }
  el<HTMLInputElement>("limit").value = state.limit ?? "";
  el<HTMLInputElement>("offset").value = state.offset ?? "";
}

// -- search -------------------------------------------------------------------

async function runSearch(state: SearchFormState): Promise<void> {
  const results = el("results");
  try {
    const response = await searchFields(serializeState(state));
    results.innerHTML = renderResults(response, state.sort);
  } catch (err) {
    if (isAbort(err)) return;
    results.innerHTML = renderError(
      err instanceof ApiError ? err.message : "search failed; is the service up?",
    );
  }
}

function submitSearch(pushUrl: boolean): void {
  const { state, problems } = readForm();
  const errorBox = el("form-error");
  if (problems.length > 0) {
    errorBox.textContent = problems.join("; ");
    return;
  }
  errorBox.textContent = "";
  if (pushUrl) {
    const query = serializeState(state).toString();
    history.pushState(null, "", query ? `?${query}` : location.pathname);
  }
  void runSearch(state);
}

function loadFromUrl(): void {
  const params = new URLSearchParams(location.search);
  const state = parseState(params);
  fillForm(state);
  if ([...params.keys()].length > 0) {
    void runSearch(state);
  }
}

// -- wiring -------------------------------------------------------------------

export function init(): void {
  el<HTMLFormElement>("search-form").addEventListener("submit", (event) => {
    event.preventDefault();
    submitSearch(true);
  });
  el("ram-add").addEventListener("click", () => addRamRow());

  // column headers re-sort on the server; the form is left as it stands
  el("results").addEventListener("click", (event) => {
    const header = (event.target as HTMLElement).closest("th.sortable");
    if (header === null) return;
    const key = header.getAttribute("data-sort") ?? "";
    const select = el<HTMLSelectElement>("sort");
    select.value = select.value === key ? "" : key;
    submitSearch(true);
  });

  // class/narrow toggle refreshes the h column in place
  el("display-toggle").addEventListener("change", () => {
    if (el("results").querySelector("table") !== null) {
      submitSearch(true);
    }
  });

  el("summary-go").addEventListener("click", async () => {
    const group = el<HTMLInputElement>("summary-group").value.trim();
    const out = el("summary-out");
    if (!isGroupLabel(group)) {
      out.innerHTML = renderError(`cannot read group label '${group}'`);
      return;
    }
    try {
      out.innerHTML = renderSummary(await fetchSummary(group));
    } catch (err) {
      out.innerHTML = renderError(
        err instanceof ApiError ? err.message : "summary failed; is the service up?",
      );
    }
  });

  window.addEventListener("popstate", loadFromUrl);
  loadFromUrl();
}

init();

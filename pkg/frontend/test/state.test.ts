import { describe, expect, it } from "vitest";

import {
  RamRow,
  SearchFormState,
  emptyState,
  normalizeRamRow,
  parseRamParam,
  parseState,
  ramParam,
  ramRowProblem,
  serializeState,
} from "../src/state.js";

function row(partial: Partial<RamRow>): RamRow {
  return { pLo: "2", pHi: null, eLo: "1", eHi: null, allowZero: false, ...partial };
}

describe("ramParam", () => {
  it("serializes a single prime with a closed exponent range", () => {
    expect(ramParam(row({ pLo: "229", eHi: "1" }))).toBe("229:1-1");
  });

  it("serializes a prime range with the allow-zero flag", () => {
    expect(ramParam(row({ pLo: "3", pHi: "5", eHi: "2", allowZero: true }))).toBe(
      "3-5:1-2:z",
    );
  });

  it("turns exponent minimum 0 into minimum 1 plus the flag", () => {
    expect(ramParam(row({ pLo: "3", pHi: "5", eLo: "0", eHi: "2" }))).toBe("3-5:1-2:z");
  });

  it("leaves the top open when there is no exponent bound", () => {
    expect(ramParam(row({ pLo: "7" }))).toBe("7:1-");
  });

  it("collapses a one-prime range", () => {
    expect(ramParam(row({ pLo: "3", pHi: "3", eHi: "4" }))).toBe("3:1-4");
  });
});

describe("parseRamParam", () => {
  it("inverts ramParam", () => {
    expect(parseRamParam("229:1-1")).toEqual(row({ pLo: "229", eHi: "1" }));
    expect(parseRamParam("3-5:1-2:z")).toEqual(
      row({ pLo: "3", pHi: "5", eHi: "2", allowZero: true }),
    );
    expect(parseRamParam("7:1-")).toEqual(row({ pLo: "7" }));
  });

  it("accepts the short single-exponent form", () => {
    expect(parseRamParam("2:4")).toEqual(row({ eLo: "4", eHi: "4" }));
  });

  it("collapses a one-prime range", () => {
    expect(parseRamParam("3-3:1-2")).toEqual(row({ pLo: "3", eHi: "2" }));
  });

  it("rejects malformed text", () => {
    for (const bad of ["banana", "2:", ":1-2", "2", "2:1-2:x", "2:1-2:z:z", "2:a-3", "-3:1"]) {
      expect(parseRamParam(bad), bad).toBeNull();
    }
  });
});

describe("ramRowProblem", () => {
  it("accepts valid rows", () => {
    expect(ramRowProblem(row({}))).toBeNull();
    expect(ramRowProblem(row({ pHi: "11", eLo: "0", eHi: "2" }))).toBeNull();
  });

  it("names the broken input", () => {
    expect(ramRowProblem(row({ pLo: "two" }))).toContain("prime");
    expect(ramRowProblem(row({ eLo: "x" }))).toContain("exponent");
    expect(ramRowProblem(row({ eLo: "3", eHi: "2" }))).toBe("empty exponent range");
    expect(ramRowProblem(row({ eLo: "0", eHi: "0" }))).toContain("at least 1");
    expect(ramRowProblem(row({ pLo: "7", pHi: "3" }))).toBe("empty prime range");
  });
});

function fullState(): SearchFormState {
  return {
    degrees: ["4", "5"],
    degreeMin: null,
    degreeMax: null,
    groups: ["4T5", "5T5"],
    sValues: ["1", "2"],
    absdiscMin: "100",
    absdiscMax: "123456789012345678901234567890",
    rdMax: "44.76",
    grdMin: "3.29",
    grdMax: "2223/343",
    ram: [
      row({ pLo: "229", eHi: "1" }),
      row({ pLo: "3", pHi: "5", eHi: "2", allowZero: true }),
    ],
    onlyListed: true,
    maxPrime: "229",
    sort: "grd",
    display: "narrow",
    limit: "20",
    offset: "40",
  };
}

describe("URL round trip", () => {
  it("is the identity on a fully loaded form", () => {
    const state = fullState();
    expect(parseState(serializeState(state))).toEqual(state);
  });

  it("is the identity on the empty form", () => {
    const params = serializeState(emptyState());
    expect(params.toString()).toBe("");
    expect(parseState(params)).toEqual(emptyState());
  });

  it("keeps huge discriminant bounds as verbatim digit strings", () => {
    const big = "9".repeat(120);
    const state = { ...emptyState(), absdiscMax: big };
    expect(parseState(serializeState(state)).absdiscMax).toBe(big);
  });

  it("round trips the degree range form", () => {
    const state = { ...emptyState(), degreeMin: "2", degreeMax: "7" };
    expect(parseState(serializeState(state))).toEqual(state);
  });

  it("omits defaults so the bare page has a bare URL", () => {
    const params = serializeState({ ...emptyState(), display: "class", onlyListed: false });
    expect([...params.keys()]).toEqual([]);
  });
});

describe("display toggle", () => {
  it("changes exactly one parameter, leaving the form untouched", () => {
    const narrowParams = serializeState(fullState());
    const classParams = serializeState({ ...fullState(), display: "class" });
    const narrowSet = new Set(narrowParams.toString().split("&"));
    const classSet = new Set(classParams.toString().split("&"));
    const onlyInNarrow = [...narrowSet].filter((p) => !classSet.has(p));
    const onlyInClass = [...classSet].filter((p) => !narrowSet.has(p));
    expect(onlyInNarrow).toEqual(["display=narrow"]);
    expect(onlyInClass).toEqual([]);
  });
});

describe("parseState", () => {
  it("drops entries it cannot read instead of failing", () => {
    const params = new URLSearchParams(
      "degree=x&degree=5&group=K4&group=4T5&ram=banana&ram=3:2-3&sort=size&only_listed=2&rd_max=abc",
    );
    const state = parseState(params);
    expect(state.degrees).toEqual(["5"]);
    expect(state.groups).toEqual(["4T5"]);
    expect(state.ram).toEqual([row({ pLo: "3", eLo: "2", eHi: "3" })]);
    expect(state.sort).toBeNull();
    expect(state.onlyListed).toBe(false);
    expect(state.rdMax).toBeNull();
  });
});

// deterministic generator; enough structure to exercise every field
function lcg(seed: number): () => number {
  let s = seed >>> 0;
  return () => {
    s = (Math.imul(s, 1664525) + 1013904223) >>> 0;
    return s / 2 ** 32;
  };
}

function randomState(rnd: () => number): SearchFormState {
  const int = (n: number) => Math.floor(rnd() * n);
  const maybe = <T>(value: T): T | null => (rnd() < 0.5 ? value : null);
  const state = emptyState();
  for (let i = int(3); i > 0; i--) state.degrees.push(String(2 + int(8)));
  if (state.degrees.length === 0) {
    state.degreeMin = maybe(String(2 + int(4)));
    state.degreeMax = maybe(String(6 + int(4)));
  }
  for (let i = int(3); i > 0; i--) state.groups.push(`${2 + int(8)}T${1 + int(40)}`);
  for (let i = int(3); i > 0; i--) state.sValues.push(String(int(5)));
  state.absdiscMin = maybe(String(1 + int(1000)));
  state.absdiscMax = maybe("1" + "0".repeat(int(40)));
  state.rdMax = maybe(`${1 + int(90)}.${int(100)}`);
  state.grdMin = maybe(`${1 + int(50)}/${1 + int(9)}`);
  state.grdMax = maybe(String(1 + int(100)));
  for (let i = int(4); i > 0; i--) {
    const pLo = 2 + int(50);
    state.ram.push(
      normalizeRamRow({
        pLo: String(pLo),
        pHi: rnd() < 0.4 ? String(pLo + 1 + int(20)) : null,
        eLo: String(int(4)),
        eHi: rnd() < 0.6 ? String(4 + int(4)) : null,
        allowZero: rnd() < 0.3,
      }),
    );
  }
  state.onlyListed = state.ram.length > 0 && rnd() < 0.4;
  state.maxPrime = maybe(String(2 + int(1000)));
  state.sort = rnd() < 0.6 ? (["rd", "grd", "absdisc"] as const)[int(3)]! : null;
  state.display = rnd() < 0.5 ? "narrow" : "class";
  state.limit = maybe(String(1 + int(100)));
  state.offset = maybe(String(int(100)));
  return state;
}

describe("URL round trip, randomized", () => {
  it("holds over generated form states", () => {
    const rnd = lcg(2024);
    for (let i = 0; i < 200; i++) {
      const state = randomState(rnd);
      expect(parseState(serializeState(state))).toEqual(state);
    }
  });
});

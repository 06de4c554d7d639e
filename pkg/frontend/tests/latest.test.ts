import { describe, expect, it } from "vitest";

import { RequestSequencer } from "../src/latest.js";

describe("RequestSequencer", () => {
  it("treats the newest token as current", () => {
    const seq = new RequestSequencer();
    const first = seq.next();
    expect(seq.isCurrent(first)).toBe(true);
  });

  it("invalidates older tokens when a new one is issued", () => {
    const seq = new RequestSequencer();
    const first = seq.next();
    const second = seq.next();
    expect(seq.isCurrent(first)).toBe(false);
    expect(seq.isCurrent(second)).toBe(true);
  });

  it("streams are independent", () => {
    const a = new RequestSequencer();
    const b = new RequestSequencer();
    const tokenA = a.next();
    b.next();
    b.next();
    expect(a.isCurrent(tokenA)).toBe(true);
  });
});

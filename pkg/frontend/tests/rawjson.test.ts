import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { rawLiteral, rawString } from "../src/rawjson.js";

function fixture(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

describe("rawLiteral", () => {
  it("returns number literals exactly as written", () => {
    const text = '{"a": 0.30000000000000004, "b": 1.0, "c": 1e-7}';
    expect(rawLiteral(text, ["a"])).toBe("0.30000000000000004");
    expect(rawLiteral(text, ["b"])).toBe("1.0");
    expect(rawLiteral(text, ["c"])).toBe("1e-7");
  });

  it("preserves literals that JSON.parse would reformat", () => {
    const text = '{"gap": 0.0, "ratio": 1.0}';
    const parsed = JSON.parse(text) as { gap: number; ratio: number };
    // The parsed values lose their formatting; the raw spans keep it.
    expect(String(parsed.gap)).toBe("0");
    expect(String(parsed.ratio)).toBe("1");
    expect(rawLiteral(text, ["gap"])).toBe("0.0");
    expect(rawLiteral(text, ["ratio"])).toBe("1.0");
  });

  it("navigates nested objects and arrays", () => {
    const text = '{"results": [{"gap": 0.25}, {"gap": 0.50, "groups": {"F": 0.10}}]}';
    expect(rawLiteral(text, ["results", 0, "gap"])).toBe("0.25");
    expect(rawLiteral(text, ["results", 1, "gap"])).toBe("0.50");
    expect(rawLiteral(text, ["results", 1, "groups", "F"])).toBe("0.10");
  });

  it("skips strings containing braces and escapes", () => {
    const text = '{"note": "a \\"b\\" {c} [d]", "x": 7}';
    expect(rawLiteral(text, ["x"])).toBe("7");
    expect(rawString(text, ["note"])).toBe('a "b" {c} [d]');
  });

  it("handles booleans and null", () => {
    const text = '{"a": true, "b": false, "c": null}';
    expect(rawLiteral(text, ["a"])).toBe("true");
    expect(rawLiteral(text, ["b"])).toBe("false");
    expect(rawLiteral(text, ["c"])).toBe("null");
  });

  it("returns whole objects and arrays as their exact span", () => {
    const text = '{"outer": {"inner": [1, 2.0, 3]}}';
    expect(rawLiteral(text, ["outer"])).toBe('{"inner": [1, 2.0, 3]}');
    expect(rawLiteral(text, ["outer", "inner"])).toBe("[1, 2.0, 3]");
  });

  it("rejects missing keys and out-of-range indices", () => {
    const text = '{"a": [1], "b": {}}';
    expect(() => rawLiteral(text, ["missing"])).toThrow("missing");
    expect(() => rawLiteral(text, ["a", 3])).toThrow("out of range");
    expect(() => rawLiteral(text, ["b", "k"])).toThrow("empty object");
  });

  it("finds values in a real metrics response", () => {
    const raw = fixture("metrics_all.json");
    expect(rawLiteral(raw, ["user_count"])).toBe("100");
    const gap = rawLiteral(raw, ["results", 0, "gap"]);
    // Confirm against the bytes themselves, independent of the scanner.
    expect(raw).toContain(`"gap":${gap}`);
    expect(gap).toBe("0.33333333333333337");
  });
});

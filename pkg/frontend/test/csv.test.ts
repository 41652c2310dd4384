import { describe, expect, it } from "vitest";
import { parseCsv, requireColumns, numericColumn, SchemaError } from "../src/csv";

describe("csv parsing", () => {
  it("skips provenance comments and splits rows", () => {
    const t = parseCsv("# tool v1\n# config x=1\na,b\n1,2\n3,4\n");
    expect(t.columns).toEqual(["a", "b"]);
    expect(t.rows).toEqual([["1", "2"], ["3", "4"]]);
    expect(t.comments).toHaveLength(2);
  });

  it("honors double quotes around embedded commas", () => {
    const t = parseCsv('map,delta\n"bubble:k=1,lambda=100,d=2",0.5\n');
    expect(t.rows[0][0]).toBe("bubble:k=1,lambda=100,d=2");
    expect(t.rows[0][1]).toBe("0.5");
  });

  it("names missing columns in schema errors", () => {
    const t = parseCsv("a,b\n1,2\n");
    expect(() => requireColumns(t, "demo", ["a", "delta", "ratio"])).toThrowError(
      /missing columns: delta, ratio/,
    );
    expect(() => requireColumns(t, "demo", ["a", "b"])).not.toThrow();
  });

  it("reads numeric columns", () => {
    const t = parseCsv("x,y\n0.5,1\n2,4\n");
    expect(numericColumn(t, "y")).toEqual([1, 4]);
  });

  it("rejects empty files", () => {
    expect(() => parseCsv("")).toThrow(SchemaError);
  });
});

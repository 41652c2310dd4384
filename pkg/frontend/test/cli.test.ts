import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

const BIN = join(__dirname, "..", "dist", "index.js");
const ARTIFACTS = join(__dirname, "..", "..", "artifacts");

function runPlots(args: string[]) {
  try {
    const stdout = execFileSync("node", [BIN, ...args], { encoding: "utf8" });
    return { code: 0, stdout, stderr: "" };
  } catch (err: any) {
    return { code: err.status ?? 1, stdout: err.stdout ?? "", stderr: err.stderr ?? "" };
  }
}

describe("plots command line", () => {
  it("is built (run `npm run build` first)", () => {
    expect(existsSync(BIN)).toBe(true);
  });

  it("renders the limit artifact and prints the intercept", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "bbm.svg");
    const res = runPlots(["bbm-convergence", join(ARTIFACTS, "limit_s1_identity.csv"), "-o", out]);
    expect(res.code).toBe(0);
    expect(res.stdout).toMatch(/extrapolation intercept: \d\.\d{3}/);
    expect(readFileSync(out, "utf8")).toContain("</svg>");
  });

  it("exits nonzero on a schema-broken CSV and names the column", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "map,d,n,degree,energy_scaled,ratio,flag\nidentity,2,10,1,1.0,1.0,\n");
    const res = runPlots(["c-of-delta", bad, "-o", join(dir, "x.svg")]);
    expect(res.code).toBe(1);
    expect(res.stderr).toContain("delta");
  });

  it("exits 2 on usage errors", () => {
    expect(runPlots([]).code).toBe(2);
    expect(runPlots(["nonsense-kind", "a.csv", "-o", "b.svg"]).code).toBe(2);
  });
});

import * as fs from "fs";
import * as path from "path";
import { fileURLToPath } from "url";
import { describe, expect, it } from "vitest";
import { main } from "../src/cli.js";

const HERE = path.dirname(fileURLToPath(import.meta.url));
const RUN = path.join(HERE, "..", "fixtures", "run");

function tmpdir(): string {
  return fs.mkdtempSync(path.join(HERE, "cli-"));
}

describe("cli", () => {
  it("density writes an svg", () => {
    const tmp = tmpdir();
    try {
      const out = path.join(tmp, "fig1b.svg");
      expect(main(["density", "--run", RUN, "--times", "auto", "--out", out])).toBe(0);
      const svg = fs.readFileSync(out, "utf8");
      expect(svg).toContain("<svg");
      expect(svg).toContain("</svg>");
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  });

  it("rates writes an svg with the series panel", () => {
    const tmp = tmpdir();
    try {
      const out = path.join(tmp, "rates.svg");
      expect(
        main(["rates", "--report", path.join(RUN, "report.json"), "--out", out]),
      ).toBe(0);
      expect(fs.readFileSync(out, "utf8")).toContain("1 / max|u_x|");
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  });

  it("explicit times are honored", () => {
    const tmp = tmpdir();
    try {
      const out = path.join(tmp, "fig.svg");
      expect(
        main(["density", "--run", RUN, "--times", "-0.4,-0.2", "--curves", "2", "--out", out]),
      ).toBe(0);
      expect(fs.existsSync(out)).toBe(true);
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  });

  it("missing artifacts produce a nonzero exit and no file", () => {
    const tmp = tmpdir();
    try {
      const out = path.join(tmp, "fig.svg");
      expect(main(["density", "--run", path.join(tmp, "nope"), "--out", out])).toBe(1);
      expect(fs.existsSync(out)).toBe(false);
    } finally {
      fs.rmSync(tmp, { recursive: true, force: true });
    }
  });

  it("unknown command exits 2", () => {
    expect(main(["wat"])).toBe(2);
  });
});

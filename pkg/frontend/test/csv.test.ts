import { describe, expect, it } from "vitest";
import { parseCsv, parseJsonWithLocation, writeCsv, SchemaError } from "../src/csv.js";

describe("csv dialect", () => {
  it("parses the schema line, header, and rows", () => {
    const t = parseCsv("# schema=1\nx,y\n0,1\n2,3.5\n");
    expect(t.schema).toBe(1);
    expect(t.columns).toEqual(["x", "y"]);
    expect(t.data.x).toEqual([0, 2]);
    expect(t.data.y).toEqual([1, 3.5]);
  });

  it("rejects a missing schema line", () => {
    expect(() => parseCsv("x,y\n0,1\n")).toThrow(SchemaError);
  });

  it("rejects ragged rows with a line number", () => {
    expect(() => parseCsv("# schema=1\nx,y\n0,1\n2\n", "f.csv")).toThrow(/f\.csv:4/);
  });

  it("rejects non-numeric fields", () => {
    expect(() => parseCsv("# schema=1\nx\nhello\n")).toThrow(/non-numeric/);
  });

  it("round-trips values exactly through serialize/parse", () => {
    const t = parseCsv(
      "# schema=1\na,b\n0.1,1e-17\n-3.0000000000000004,12345678901234567\n",
    );
    const again = parseCsv(writeCsv(t));
    expect(again.data).toEqual(t.data);
    expect(again.columns).toEqual(t.columns);
    expect(again.schema).toBe(t.schema);
  });
});

describe("json with location", () => {
  it("parses valid json", () => {
    expect(parseJsonWithLocation('{"a": 1}')).toEqual({ a: 1 });
  });

  it("reports line info on malformed json", () => {
    expect(() => parseJsonWithLocation('{\n "a": 1,\n "b": oops\n}', "r.json")).toThrow(
      /r\.json:3:/,
    );
  });
});

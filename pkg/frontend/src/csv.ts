/**
 * Reader/writer for the run artifacts' CSV dialect:
 * a "# schema=N" version line, a header row, then numeric rows.
 */
import * as fs from "fs";

export interface CsvTable {
  schema: number;
  columns: string[];
  /** column name -> values, all rows parsed as finite-or-nan numbers */
  data: Record<string, number[]>;
  rows: number;
}

export class SchemaError extends Error {}

export function parseCsv(text: string, source = "<csv>"): CsvTable {
  const lines = text.split("\n");
  if (lines.length < 2 || !lines[0].startsWith("# schema=")) {
    throw new SchemaError(`${source}: missing "# schema=" version line`);
  }
  const schema = Number(lines[0].slice("# schema=".length).trim());
  if (!Number.isInteger(schema)) {
    throw new SchemaError(`${source}: bad schema version ${lines[0]}`);
  }
  const columns = lines[1].split(",").map((c) => c.trim());
  if (columns.some((c) => c.length === 0)) {
    throw new SchemaError(`${source}: empty column name in header`);
  }
  const data: Record<string, number[]> = {};
  for (const c of columns) data[c] = [];
  let rows = 0;
  for (let i = 2; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === "") continue;
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `${source}:${i + 1}: expected ${columns.length} fields, got ${parts.length}`,
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const v = Number(parts[j]);
      if (Number.isNaN(v) && parts[j].trim() !== "nan") {
        throw new SchemaError(`${source}:${i + 1}: non-numeric field "${parts[j]}"`);
      }
      data[columns[j]].push(v);
    }
    rows++;
  }
  return { schema, columns, data, rows };
}

export function readCsv(path: string): CsvTable {
  if (!fs.existsSync(path)) {
    throw new SchemaError(`missing artifact: ${path}`);
  }
  return parseCsv(fs.readFileSync(path, "utf8"), path);
}

/** Serialize a table in the same dialect (17 significant digits, like the producer). */
export function writeCsv(table: CsvTable): string {
  const out: string[] = [`# schema=${table.schema}`, table.columns.join(",")];
  for (let i = 0; i < table.rows; i++) {
    out.push(table.columns.map((c) => fmt(table.data[c][i])).join(","));
  }
  return out.join("\n") + "\n";
}

function fmt(v: number): string {
  if (Number.isNaN(v)) return "nan";
  if (Object.is(v, -0)) return "-0";
  return String(v);
}

/** Best-effort byte offset of a JSON syntax error from the V8 message. */
function locateJsonError(text: string, msg: string): number | null {
  const pos = /position (\d+)/.exec(msg);
  if (pos) return Number(pos[1]);
  // V8 variant: Unexpected token 'X', ..."<snippet>" is not valid JSON
  const snip = /Unexpected token '(.)', (?:\.\.\.)?"([\s\S]*?)"(?:\.\.\.)? is not valid JSON/.exec(msg);
  if (snip) {
    const [, token, context] = snip;
    const at = text.indexOf(context);
    if (at >= 0) {
      const tok = text.indexOf(token, at);
      return tok >= 0 ? tok : at;
    }
  }
  if (/Unexpected end of JSON input/.test(msg)) return text.length - 1;
  return null;
}

/** Parse JSON with a line/column location on syntax errors. */
export function parseJsonWithLocation(text: string, source = "<json>"): unknown {
  try {
    return JSON.parse(text);
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err);
    const at = locateJsonError(text, msg);
    if (at !== null) {
      const before = text.slice(0, at);
      const line = before.split("\n").length;
      const col = at - before.lastIndexOf("\n");
      throw new SchemaError(`${source}:${line}:${col}: ${msg}`);
    }
    throw new SchemaError(`${source}: ${msg}`);
  }
}

export function readJson(path: string): unknown {
  if (!fs.existsSync(path)) {
    throw new SchemaError(`missing artifact: ${path}`);
  }
  return parseJsonWithLocation(fs.readFileSync(path, "utf8"), path);
}

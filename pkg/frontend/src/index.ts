export { parseCsv, readCsv, writeCsv, readJson, parseJsonWithLocation, SchemaError } from "./csv.js";
export type { CsvTable } from "./csv.js";
export {
  loadRunArtifacts,
  validateEvent,
  validateReport,
  validateSeries,
  validateSnapshot,
  SNAPSHOT_COLUMNS,
} from "./schema.js";
export type { EventJson, FitResultJson, ReportJson, RunArtifacts } from "./schema.js";
export { renderDensityEvolution, selectSnapshotIndices, DEFAULT_DENSITY_SPEC } from "./density.js";
export type { DensityPlotSpec } from "./density.js";
export { renderRateFits, DEFAULT_RATE_SPEC } from "./rates.js";
export type { RatePlotSpec } from "./rates.js";
export { main as cliMain } from "./cli.js";

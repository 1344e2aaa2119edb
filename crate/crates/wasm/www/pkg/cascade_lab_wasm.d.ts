/* tslint:disable */
/* eslint-disable */

/**
 * JSON object with the single, upper and optimal-lower bounds at `t = 2^log2_t`.
 */
export function boundsJson(kappa: number, n: number, log2_t: number, op: string): string;

/**
 * CSV with columns `log2_t,sec1,sec2_upper,sec2_lower`.
 */
export function curvesCsv(kappa: number, n: number, from: number, to: number, step: number): string;

/**
 * One advantage record as JSON. Budgets arrive as `f64` because JS numbers
 * are doubles; they must be nonnegative integers.
 */
export function simulateJson(op: string, kappa: number, n: number, q: number, t: number, attack: string, trials: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly boundsJson: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly curvesCsv: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly simulateJson: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;

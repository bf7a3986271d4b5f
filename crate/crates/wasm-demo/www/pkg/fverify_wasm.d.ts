/* tslint:disable */
/* eslint-disable */

/**
 * Decompositions, reliability tests and C statistic of the same simulated
 * series, as a JSON string.
 */
export function analysis_json(n: number, alpha: number, beta: number, law: string, seed: bigint): string;

export function convert_odds(home: number, draw: number, away: number): Float64Array;

/**
 * SVG reliability diagram of `n` simulated forecasts whose outcomes follow
 * logit Pr(X = 1) = alpha + beta·logit(p).
 */
export function reliability_svg(n: number, alpha: number, beta: number, law: string, seed: bigint, bands: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analysis_json: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number, number];
    readonly convert_odds: (a: number, b: number, c: number) => [number, number, number, number];
    readonly reliability_svg: (a: number, b: number, c: number, d: number, e: number, f: bigint, g: number) => [number, number, number, number];
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

/* tslint:disable */
/* eslint-disable */

/**
 * Sampled curve `y(x)`.
 */
export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly x: Float64Array;
    readonly y: Float64Array;
}

/**
 * Row-major |S21| in dB; rows follow probe frequency, columns detuning.
 */
export class Heatmap {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly columns: number;
    readonly db: Float64Array;
    readonly rows: number;
    readonly x_max: number;
    readonly x_min: number;
    readonly y_max: number;
    readonly y_min: number;
}

export function anisotropy_curve(bias_mt: number, span_mhz: number, points: number, full: boolean): Curve;

export function detuning_map(dissipative: boolean, j_mhz: number, gamma_mhz: number, detuning_mhz: number, columns: number, rows: number): Heatmap;

/**
 * Giant decay rate in MHz at `f_res`, for the page's readout.
 */
export function giant_decay_mhz(f_res_ghz: number, kappa_mhz: number, length_cm: number): number;

export function single_spectrum(f_res_ghz: number, kappa_mhz: number, beta_mhz: number, length_cm: number, half_span_mhz: number, points: number): Curve;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly __wbg_heatmap_free: (a: number, b: number) => void;
    readonly anisotropy_curve: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly curve_x: (a: number) => [number, number];
    readonly curve_y: (a: number) => [number, number];
    readonly detuning_map: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly giant_decay_mhz: (a: number, b: number, c: number) => [number, number, number];
    readonly heatmap_columns: (a: number) => number;
    readonly heatmap_db: (a: number) => [number, number];
    readonly heatmap_rows: (a: number) => number;
    readonly heatmap_x_max: (a: number) => number;
    readonly heatmap_x_min: (a: number) => number;
    readonly heatmap_y_max: (a: number) => number;
    readonly heatmap_y_min: (a: number) => number;
    readonly single_spectrum: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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

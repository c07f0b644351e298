/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curve_free: (a: number, b: number) => void;
export const __wbg_heatmap_free: (a: number, b: number) => void;
export const anisotropy_curve: (a: number, b: number, c: number, d: number) => [number, number, number];
export const curve_x: (a: number) => [number, number];
export const curve_y: (a: number) => [number, number];
export const detuning_map: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const giant_decay_mhz: (a: number, b: number, c: number) => [number, number, number];
export const heatmap_columns: (a: number) => number;
export const heatmap_db: (a: number) => [number, number];
export const heatmap_rows: (a: number) => number;
export const heatmap_x_max: (a: number) => number;
export const heatmap_x_min: (a: number) => number;
export const heatmap_y_max: (a: number) => number;
export const heatmap_y_min: (a: number) => number;
export const single_spectrum: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

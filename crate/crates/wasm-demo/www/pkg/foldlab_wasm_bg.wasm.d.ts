/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_export_log: (a: number) => [number, number];
export const demo_fold: (a: number, b: number) => [number, number, number, number];
export const demo_frame: (a: number, b: number) => [number, number];
export const demo_frame_count: (a: number) => number;
export const demo_goal_mask: (a: number) => [number, number];
export const demo_grid_pixels: (a: number) => number;
export const demo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const demo_place_marker: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
export const demo_positions: (a: number) => [number, number];
export const demo_reset: (a: number, b: number) => [number, number, number];
export const demo_result_mask: (a: number) => [number, number];
export const demo_simulate: (a: number, b: number) => [number, number, number];
export const demo_state: (a: number) => [number, number];
export const demo_triangles: (a: number) => [number, number];
export const demo_undo: (a: number, b: number) => [number, number, number];
export const demo_workspace_side: (a: number) => number;
export const goal_catalog: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;

/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * The demonstration log as NDJSON.
     */
    export_log(): string;
    /**
     * Executes every pair from the flat cloth and returns the score as JSON.
     */
    fold(t_ms: number): string;
    /**
     * Flat x, y, z positions of animation frame `index` from the last command.
     */
    frame(index: number): Float32Array;
    /**
     * Animation frames held from the last command.
     */
    frame_count(): number;
    /**
     * Goal occupancy, row-major from the north edge, 1 for cloth.
     */
    goal_mask(): Uint8Array;
    grid_pixels(): number;
    constructor(goal: string, n_folds: number, preview: boolean);
    /**
     * Places or moves a marker; `kind` is "pick" or "place".
     */
    place_marker(pair: number, kind: string, x: number, y: number, t_ms: number): void;
    /**
     * Flat x, y, z positions of the current cloth.
     */
    positions(): Float32Array;
    reset(t_ms: number): number;
    /**
     * Top-down occupancy of the current cloth, same layout as the goal.
     */
    result_mask(): Uint8Array;
    /**
     * Previews the next marker pair; returns the number of animation frames.
     */
    simulate(t_ms: number): number;
    /**
     * Session state as JSON: slots, counters and which commands are enabled.
     */
    state(): string;
    /**
     * Triangle vertex indices, three per triangle.
     */
    triangles(): Uint32Array;
    /**
     * Reverts the last preview.
     */
    undo(t_ms: number): number;
    workspace_side(): number;
}

/**
 * Builtin goals as JSON: id, name and description.
 */
export function goal_catalog(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_export_log: (a: number) => [number, number];
    readonly demo_fold: (a: number, b: number) => [number, number, number, number];
    readonly demo_frame: (a: number, b: number) => [number, number];
    readonly demo_frame_count: (a: number) => number;
    readonly demo_goal_mask: (a: number) => [number, number];
    readonly demo_grid_pixels: (a: number) => number;
    readonly demo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly demo_place_marker: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly demo_positions: (a: number) => [number, number];
    readonly demo_reset: (a: number, b: number) => [number, number, number];
    readonly demo_result_mask: (a: number) => [number, number];
    readonly demo_simulate: (a: number, b: number) => [number, number, number];
    readonly demo_state: (a: number) => [number, number];
    readonly demo_triangles: (a: number) => [number, number];
    readonly demo_undo: (a: number, b: number) => [number, number, number];
    readonly demo_workspace_side: (a: number) => number;
    readonly goal_catalog: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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

/* tslint:disable */
/* eslint-disable */

/**
 * Samples the precision lattice of a fully annotated program.
 */
export function dynamize(source: string, seed: number, bins: number, samples_per_node: number): string;

/**
 * Renders one pipeline stage: `ast`, `elab`, `anf` or `core`.
 */
export function emit(source: string, stage: string, dfo: boolean, typing: string): string;

/**
 * Compiles and runs `source` under `mode` (`g`, `mc` or `mv`) with
 * `typing` (`gradual` or `static`).
 */
export function run(source: string, mode: string, dfo: boolean, typing: string, input: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dynamize: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly emit: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly run: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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

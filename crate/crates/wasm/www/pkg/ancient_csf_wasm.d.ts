/* tslint:disable */
/* eslint-disable */

/**
 * An admissible curve under the flow, advanced in chunks of steps.
 */
export class Evolution {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Advances `steps` time steps and reports the monitors.
     */
    advance(steps: number): string;
    constructor(s_anchor: number);
}

/**
 * Builds the admissible curve anchored at `s_anchor < 0`.
 */
export function construct(s_anchor: number): string;

/**
 * The endpoint inequality on an `n × n` grid.
 */
export function endpoint_grid(n: number, flip: boolean): string;

/**
 * Integrates the profile on `[-s_max, s_max]` and checks its identities.
 */
export function yinyang(s_max: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_evolution_free: (a: number, b: number) => void;
    readonly construct: (a: number) => [number, number];
    readonly endpoint_grid: (a: number, b: number) => [number, number];
    readonly evolution_advance: (a: number, b: number) => [number, number];
    readonly evolution_new: (a: number) => [number, number, number];
    readonly yinyang: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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

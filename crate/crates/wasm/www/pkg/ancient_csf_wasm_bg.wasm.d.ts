/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_evolution_free: (a: number, b: number) => void;
export const construct: (a: number) => [number, number];
export const endpoint_grid: (a: number, b: number) => [number, number];
export const evolution_advance: (a: number, b: number) => [number, number];
export const evolution_new: (a: number) => [number, number, number];
export const yinyang: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;

/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const density: (a: number, b: number) => [number, number, number, number];
export const lee_yang: (a: number, b: number, c: number) => [number, number, number, number];
export const roots: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

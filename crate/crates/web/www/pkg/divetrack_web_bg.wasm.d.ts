/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const extraction: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const loss_curve: (a: number) => [number, number, number, number];
export const tracking: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

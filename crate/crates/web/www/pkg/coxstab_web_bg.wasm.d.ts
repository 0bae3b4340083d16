/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demosession_free: (a: number, b: number) => void;
export const demosession_dataset: (a: number) => [number, number, number, number];
export const demosession_fit: (a: number, b: number, c: number) => [number, number, number, number];
export const demosession_new: (a: number, b: number, c: number) => [number, number, number];
export const demosession_path: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const demosession_stability: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

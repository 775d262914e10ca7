/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_planted_free: (a: number, b: number) => void;
export const hard_instance_profile: (a: number, b: number, c: number) => [number, number, number, number];
export const planted_cluster: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const planted_new: (a: number, b: number) => [number, number, number];
export const planted_summary: (a: number) => [number, number, number, number];
export const planted_sweep: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

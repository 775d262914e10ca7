/* tslint:disable */
/* eslint-disable */

/**
 * A planted three-block benchmark graph; block `A` is vertices `0..300`.
 */
export class Planted {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * PageRank-Nibble from `seed` with the quality of its output against `A`.
     */
    cluster(seed: number, conn: number, vol0: number): string;
    constructor(beta: number, rng_seed: number);
    /**
     * Sweep profile and Lovász–Simonovits curve of the approximate
     * PageRank vector from `seed`.
     */
    sweep(seed: number, alpha: number, epsilon: number): string;
    readonly summary: string;
}

/**
 * Exact PageRank from `a` on the two-chain instance, normalized by degree,
 * along the top chain and the bottom chain.
 */
export function hard_instance_profile(ell: number, phi_ell2: number, gamma: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_planted_free: (a: number, b: number) => void;
    readonly hard_instance_profile: (a: number, b: number, c: number) => [number, number, number, number];
    readonly planted_cluster: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly planted_new: (a: number, b: number) => [number, number, number];
    readonly planted_summary: (a: number) => [number, number, number, number];
    readonly planted_sweep: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
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

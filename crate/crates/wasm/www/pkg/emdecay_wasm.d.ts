/* tslint:disable */
/* eslint-disable */

/**
 * `H_l` on a log grid `tau in [tau_min, 1]`: exact series and the three
 * early-time forms.
 */
export class Curves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    early(): Float64Array;
    early_early(): Float64Array;
    exact(): Float64Array;
    h0(): number;
    late_early(): Float64Array;
    tau(): Float64Array;
}

/**
 * Boundary `dH/dt` samples with fitted early and late power laws.
 */
export class VoltageFit {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Intersection time of the two fitted power laws, s.
     */
    crossover(): number;
    /**
     * `1 / kappa^2`, s.
     */
    crossover_expected(): number;
    early_intercept(): number;
    early_slope(): number;
    late_intercept(): number;
    late_slope(): number;
    t(): Float64Array;
    v(): Float64Array;
}

export function decayCurves(mu_ratio: number, l: number, tau_min: number, points: number): Curves;

export function sphereRoots(mu_ratio: number, l: number, n: number): Float64Array;

export function voltageFit(kappa: number, early_lo: number, early_hi: number, late_lo: number, late_hi: number, points: number): VoltageFit;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curves_free: (a: number, b: number) => void;
    readonly __wbg_voltagefit_free: (a: number, b: number) => void;
    readonly curves_early: (a: number) => [number, number];
    readonly curves_early_early: (a: number) => [number, number];
    readonly curves_exact: (a: number) => [number, number];
    readonly curves_h0: (a: number) => number;
    readonly curves_late_early: (a: number) => [number, number];
    readonly curves_tau: (a: number) => [number, number];
    readonly decayCurves: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly sphereRoots: (a: number, b: number, c: number) => [number, number, number, number];
    readonly voltageFit: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly voltagefit_crossover: (a: number) => number;
    readonly voltagefit_crossover_expected: (a: number) => number;
    readonly voltagefit_early_intercept: (a: number) => number;
    readonly voltagefit_early_slope: (a: number) => number;
    readonly voltagefit_late_intercept: (a: number) => number;
    readonly voltagefit_late_slope: (a: number) => number;
    readonly voltagefit_t: (a: number) => [number, number];
    readonly voltagefit_v: (a: number) => [number, number];
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

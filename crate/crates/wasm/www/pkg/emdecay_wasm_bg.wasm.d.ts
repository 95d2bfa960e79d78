/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curves_free: (a: number, b: number) => void;
export const __wbg_voltagefit_free: (a: number, b: number) => void;
export const curves_early: (a: number) => [number, number];
export const curves_early_early: (a: number) => [number, number];
export const curves_exact: (a: number) => [number, number];
export const curves_h0: (a: number) => number;
export const curves_late_early: (a: number) => [number, number];
export const curves_tau: (a: number) => [number, number];
export const decayCurves: (a: number, b: number, c: number, d: number) => [number, number, number];
export const sphereRoots: (a: number, b: number, c: number) => [number, number, number, number];
export const voltageFit: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const voltagefit_crossover: (a: number) => number;
export const voltagefit_crossover_expected: (a: number) => number;
export const voltagefit_early_intercept: (a: number) => number;
export const voltagefit_early_slope: (a: number) => number;
export const voltagefit_late_intercept: (a: number) => number;
export const voltagefit_late_slope: (a: number) => number;
export const voltagefit_t: (a: number) => [number, number];
export const voltagefit_v: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;

/* tslint:disable */
/* eslint-disable */

/**
 * A model trained on the seen part of the bundled corpus, plus an LM over
 * the same utterances.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * JSON with LP, LP_mean, LP_pen, LP_norm and SLOR.
     */
    acceptability(sentence: string): string;
    /**
     * Ids of every intent in the bundled corpus.
     */
    intents(): string[];
    /**
     * Trains on a seed-dependent split; takes a second or two.
     */
    constructor(seed: number);
    /**
     * JSON `{intent, ranked: [{intent, text, score, unseen}]}`.
     */
    predict(utterance: string): string;
    /**
     * Ids of the intents held out from training.
     */
    unseenIntents(): string[];
}

/**
 * JSON object mapping each built-in template id to the lexicalized label.
 */
export function lexicalizeLabel(label: string, capitalize: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_acceptability: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_intents: (a: number) => [number, number];
    readonly demo_new: (a: number) => [number, number, number];
    readonly demo_predict: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_unseenIntents: (a: number) => [number, number];
    readonly lexicalizeLabel: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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

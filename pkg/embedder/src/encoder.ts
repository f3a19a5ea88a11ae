// Text encoders. The production encoder wraps a transformers.js
// feature-extraction pipeline (first-token pooling, deterministic
// inference); any object with the same surface can stand in, which keeps
// the rest of the package testable without model downloads.

export interface TextEncoder {
  /** Output vector length; becomes the embedding file's dimension. */
  readonly hiddenSize: number;
  /** Maximum input length (tokens for real models). Inputs are truncated. */
  readonly maxLength: number;
  encode(texts: string[]): Promise<number[][]>;
}

export const DEFAULT_MODEL = "Xenova/scibert_scivocab_uncased";

export type DeviceHint = "auto" | "cpu" | "gpu" | "wasm" | "webgpu";

export async function loadTransformersEncoder(
  modelId: string = DEFAULT_MODEL,
  device?: DeviceHint,
): Promise<TextEncoder> {
  let transformers;
  try {
    transformers = await import("@huggingface/transformers");
  } catch (cause) {
    throw new Error(
      "the @huggingface/transformers package is not installed; " +
        "install it or pass a custom encoder",
      { cause },
    );
  }
  let extractor;
  try {
    extractor = await transformers.pipeline("feature-extraction", modelId, {
      ...(device ? { device } : {}),
    });
  } catch (cause) {
    throw new Error(`could not load encoder model '${modelId}'`, { cause });
  }
  const tokenizer = extractor.tokenizer as { model_max_length?: number };
  const maxLength =
    typeof tokenizer.model_max_length === "number" &&
    Number.isFinite(tokenizer.model_max_length)
      ? tokenizer.model_max_length
      : 512;

  let hiddenSize = 0;
  // the pipeline tokenizes with padding and truncation to the model's
  // maximum length; first-token pooling, no normalisation
  const encode = async (texts: string[]): Promise<number[][]> => {
    const output = await extractor(texts, {
      pooling: "cls",
      normalize: false,
    });
    const rows = output.tolist() as number[][];
    if (hiddenSize === 0 && rows.length > 0) hiddenSize = rows[0].length;
    return rows;
  };

  // resolve the hidden size up front so callers can rely on it
  const probe = await encode(["dimension probe"]);
  hiddenSize = probe[0].length;
  return {
    get hiddenSize() {
      return hiddenSize;
    },
    maxLength,
    encode,
  };
}

// Must stay byte-identical to the string every published report carries.
// The test suite compares it against the committed API fixture bytes.
export const CANONICAL_DISCLAIMER =
  "Fairness metrics are relative; no AI is completely unbiased.";

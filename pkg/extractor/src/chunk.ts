/**
 * Sentence splitting, tokenization, and rule-based noun-phrase chunking.
 *
 * There is no dependency parser here on purpose. Phrases are anchored at
 * head tokens the lexicon recognizes and extended leftward over modifier
 * material; that is crude but fully deterministic, and the engine downstream
 * never depends on recall.
 */

import {
  ABBREVIATIONS,
  COLLECTIVE_NOUNS,
  DETERMINERS,
  MODIFIER_ADJECTIVES,
  PERSON_NOUNS,
  inGazetteer,
  inStemSet,
  isPluralShaped,
} from "./lexicon.js";

export interface NounPhrase {
  /** Phrase tokens, determiner excluded. */
  tokens: string[];
  /** Index of the head within tokens. */
  headIndex: number;
  /** The determiner immediately before the phrase, if any. */
  det: string | null;
}

export interface PhraseSpan extends NounPhrase {
  /** Index of tokens[0] within the source sentence. */
  start: number;
}

// "U.S.", "U.K.", and friends; the trailing period belongs to the token.
const ACRONYM = /^(?:[A-Za-z]\.){2,}$/;

const stripToken = (raw: string): string => {
  let t = raw.replace(/^["'“”‘’(\[]+/, "").replace(/["'“”‘’)\],;:]+$/g, "");
  if (!ACRONYM.test(t) && !ABBREVIATIONS.has(t)) {
    t = t.replace(/[.!?]+$/, "");
  }
  return t;
};

const endsSentence = (raw: string, stripped: string): boolean =>
  /[.!?]["'”’)]*$/.test(raw) && !ACRONYM.test(stripped) && !ABBREVIATIONS.has(stripped);

/** Split text into sentences of cleaned tokens. */
export function splitSentences(text: string): string[][] {
  const sentences: string[][] = [];
  let current: string[] = [];
  for (const raw of text.split(/\s+/)) {
    if (!raw) continue;
    const token = stripToken(raw);
    if (token) current.push(token);
    if (endsSentence(raw, token) && current.length) {
      sentences.push(current);
      current = [];
    }
  }
  if (current.length) sentences.push(current);
  return sentences;
}

const isCapitalized = (token: string): boolean => /^[A-Z]/.test(token);
const isAllCaps = (token: string): boolean => /^[A-Z]{2,}$/.test(token);
export const isNumber = (token: string): boolean => /^\d+(?:[.,]\d+)*$/.test(token);

/**
 * A capitalized token counts as named-entity material unless it sits at the
 * start of the sentence and nothing marks it as a real name: an acronym
 * shape, a gazetteer entry, or a gazetteer bigram with the next token.
 */
function neMaterial(sentence: string[], i: number): boolean {
  const token = sentence[i]!;
  if (!isCapitalized(token)) return false;
  if (i > 0) return true;
  if (isAllCaps(token) || ACRONYM.test(token) || inGazetteer(token)) return true;
  const next = sentence[i + 1];
  return next !== undefined && isCapitalized(next) && inGazetteer(`${token} ${next}`);
}

const isDeterminer = (token: string): boolean => DETERMINERS.has(token.toLowerCase());

function isHeadCandidate(sentence: string[], i: number): boolean {
  const token = sentence[i]!;
  if (isDeterminer(token)) return false;
  if (inStemSet(token, PERSON_NOUNS) || inStemSet(token, COLLECTIVE_NOUNS)) {
    // "Leaders" at sentence start is the common noun, not a name.
    return true;
  }
  return neMaterial(sentence, i) && isPluralShaped(token);
}

function isPhraseMaterial(sentence: string[], i: number): boolean {
  const token = sentence[i]!;
  if (isDeterminer(token)) return false;
  return (
    neMaterial(sentence, i) ||
    isNumber(token) ||
    MODIFIER_ADJECTIVES.has(token.toLowerCase()) ||
    isHeadCandidate(sentence, i)
  );
}

/**
 * Chunk one sentence into noun phrases.
 *
 * A phrase is a maximal run of phrase material containing at least one head
 * candidate; its head is the rightmost candidate in the run. Runs without a
 * head produce nothing.
 */
export function phraseSpans(sentence: string[]): PhraseSpan[] {
  const phrases: PhraseSpan[] = [];
  let start = -1;
  const flush = (end: number) => {
    // [start, end) is a maximal eligible run.
    if (start < 0) return;
    let head = -1;
    for (let i = end - 1; i >= start; i--) {
      if (isHeadCandidate(sentence, i)) {
        head = i;
        break;
      }
    }
    if (head >= 0) {
      const before = sentence[start - 1];
      phrases.push({
        tokens: sentence.slice(start, end),
        headIndex: head - start,
        det: before !== undefined && isDeterminer(before) ? before : null,
        start,
      });
    }
    start = -1;
  };
  for (let i = 0; i < sentence.length; i++) {
    if (isPhraseMaterial(sentence, i)) {
      if (start < 0) start = i;
    } else {
      flush(i);
    }
  }
  flush(sentence.length);
  return phrases;
}

export function nounPhrases(sentence: string[]): NounPhrase[] {
  return phraseSpans(sentence).map(({ start, ...phrase }) => phrase);
}

export { neMaterial };

/**
 * Entity typing for chunked noun phrases.
 *
 * This is a stand-in heuristic kept behind one function so nothing else in
 * the extractor, and nothing in the engine, depends on how it decides. The
 * plural test and the collective-noun inventory live in the lexicon and are
 * documented there; neither claims to be faithful to any particular tagger.
 */

import {
  COLLECTIVE_NOUNS,
  PERSON_NOUNS,
  inStemSet,
  isPluralShaped,
} from "./lexicon.js";
import type { MentionRecord } from "./types.js";

/**
 * Decide the mention type from the head token. Returns null when the phrase
 * is not a group-of-persons reference and should produce no record.
 */
export function classifyHead(
  head: string,
  headIsNe: boolean,
): MentionRecord["entity_type"] | null {
  if (headIsNe) {
    return isPluralShaped(head) ? "person-nes" : null;
  }
  if (inStemSet(head, PERSON_NOUNS)) {
    return isPluralShaped(head) ? "person-nns" : "person-nn";
  }
  if (inStemSet(head, COLLECTIVE_NOUNS)) return "group";
  return null;
}

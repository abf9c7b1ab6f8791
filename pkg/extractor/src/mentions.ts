/** Noun phrases to engine mention records. */

import {
  isNumber,
  neMaterial,
  phraseSpans,
  splitSentences,
  type PhraseSpan,
} from "./chunk.js";
import {
  COLLECTIVE_NOUNS,
  MODIFIER_ADJECTIVES,
  PERSON_NOUNS,
  inStemSet,
  neLabel,
} from "./lexicon.js";
import { classifyHead } from "./typing.js";
import type {
  ArticleSet,
  ComponentRecord,
  MentionRecord,
  NeComponentRecord,
} from "./types.js";

/** The engine rejects mention texts longer than this. */
export const MAX_TEXT_TOKENS = 20;

interface PhraseInSentence extends PhraseSpan {
  sentence: string[];
}

function componentsOf(
  phrase: PhraseInSentence,
  neTokens: Set<number>,
): ComponentRecord[] {
  return phrase.tokens.map((token, i) => {
    const lemma = token.toLowerCase();
    if (i === phrase.headIndex) return { lemma, role: "head" as const };
    if (neTokens.has(i)) return { lemma, role: "compound" as const };
    if (isNumber(token)) return { lemma, role: "nummod" as const };
    if (MODIFIER_ADJECTIVES.has(lemma)) return { lemma, role: "amod" as const };
    return { lemma, role: "nmod" as const };
  });
}

/**
 * Group adjacent NE-material tokens into surfaces. The head token joins a
 * surface only when the head itself is a named entity (person-nes case).
 */
function neComponentsOf(
  phrase: PhraseInSentence,
  headIsNe: boolean,
): { nes: NeComponentRecord[]; neTokens: Set<number> } {
  const neTokens = new Set<number>();
  for (let i = 0; i < phrase.tokens.length; i++) {
    if (i === phrase.headIndex && !headIsNe) continue;
    if (neMaterial(phrase.sentence, phrase.start + i)) neTokens.add(i);
  }
  const nes: NeComponentRecord[] = [];
  let run: string[] = [];
  const flush = () => {
    if (run.length) {
      const surface = run.join(" ");
      nes.push({ surface, ne_label: neLabel(surface) });
      run = [];
    }
  };
  for (let i = 0; i < phrase.tokens.length; i++) {
    if (neTokens.has(i)) run.push(phrase.tokens[i]!);
    else flush();
  }
  flush();
  return { nes, neTokens };
}

export interface MentionExtraction {
  mentions: MentionRecord[];
  droppedOversize: { docId: string; text: string }[];
  sentences: number;
}

/** Extract typed mention records from every article body. */
export function extractMentions(set: ArticleSet): MentionExtraction {
  const seen = new Set<string>();
  for (const article of set.articles) {
    if (seen.has(article.docId)) {
      throw new Error(`duplicate doc id: ${article.docId}`);
    }
    seen.add(article.docId);
  }

  const mentions: MentionRecord[] = [];
  const droppedOversize: { docId: string; text: string }[] = [];
  let sentenceCount = 0;

  for (const article of set.articles) {
    let counter = 0;
    for (const sentence of splitSentences(article.body)) {
      sentenceCount++;
      for (const span of phraseSpans(sentence)) {
        const phrase: PhraseInSentence = { ...span, sentence };
        const head = span.tokens[span.headIndex]!;
        const headIsNe = neMaterial(sentence, span.start + span.headIndex)
          && !inStemSet(head, PERSON_NOUNS)
          && !inStemSet(head, COLLECTIVE_NOUNS);
        const entityType = classifyHead(head, headIsNe);
        if (entityType === null) continue;

        const textTokens = span.det ? [span.det, ...span.tokens] : span.tokens;
        const text = textTokens.join(" ");
        if (textTokens.length > MAX_TEXT_TOKENS) {
          droppedOversize.push({ docId: article.docId, text });
          continue;
        }

        const { nes, neTokens } = neComponentsOf(phrase, headIsNe);
        counter++;
        mentions.push({
          mention_id: `${article.docId}-m${counter}`,
          doc_id: article.docId,
          text,
          entity_type: entityType,
          rp_text: span.tokens.join(" "),
          head,
          components: componentsOf(phrase, neTokens),
          ne_components: nes,
        });
      }
    }
  }
  return { mentions, droppedOversize, sentences: sentenceCount };
}

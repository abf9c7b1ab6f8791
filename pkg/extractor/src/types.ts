/** One parsed news article. */
export interface Article {
  docId: string;
  title: string;
  body: string;
}

/** A set of related articles covering one event. docIds must be unique. */
export interface ArticleSet {
  eventId: string;
  articles: Article[];
}

/** A phrase component with its dependency role, as the engine expects it. */
export interface ComponentRecord {
  lemma: string;
  role: "head" | "compound" | "amod" | "nmod" | "nummod";
}

export interface NeComponentRecord {
  surface: string;
  ne_label: string;
}

/** One mention line of mentions.jsonl. Field names mirror the engine schema. */
export interface MentionRecord {
  mention_id: string;
  doc_id: string;
  text: string;
  entity_type: "person-nes" | "person-nns" | "person-nn" | "group";
  rp_text: string;
  head: string;
  components: ComponentRecord[];
  ne_components: NeComponentRecord[];
}

export interface RelationRecord {
  a: string;
  b: string;
  chain_type: "cn" | "op";
}

/** Everything the extraction run wants to tell the operator. */
export interface ExtractionReport {
  docs: number;
  sentences: number;
  mentions: number;
  distinctRpTexts: number;
  /** NPs dropped for exceeding the token cap, per doc. */
  droppedOversize: { docId: string; text: string }[];
  neSurfaces: string[];
  relationsWritten: number;
  /** NE surfaces with no relation entry in cache or ConceptNet. */
  relationMisses: string[];
  embeddingDim: number;
  embeddingRows: number;
  /** rp_text tokens with no vector in the model. */
  embeddingMisses: string[];
}

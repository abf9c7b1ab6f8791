/**
 * Word lists backing the rule-based chunker and the entity-typing heuristic.
 *
 * None of this claims linguistic completeness. The inventories cover
 * political news prose, which is what the engine is pointed at; extending
 * them is the expected way to adapt the extractor to a new domain.
 */

/** Person-denoting common nouns, singular stems. Plurals are derived. */
export const PERSON_NOUNS = new Set([
  "activist", "adviser", "aide", "ambassador", "analyst", "candidate",
  "chairman", "chief", "commander", "delegate", "deputy", "diplomat",
  "envoy", "expert", "farmer", "guard", "journalist", "lawmaker", "lawyer",
  "leader", "legislator", "migrant", "minister", "monitor", "negotiator",
  "officer", "official", "organizer", "politician", "president", "protester",
  "pundit", "refugee", "reporter", "resident", "secretary", "senator",
  "settler", "soldier", "spokesman", "spokeswoman", "staffer", "strategist",
  "supporter", "voter", "worker",
]);

/** Collective nouns mapped to the "group" mention type. */
export const COLLECTIVE_NOUNS = new Set([
  "administration", "board", "cabinet", "caucus", "coalition", "commission",
  "committee", "council", "crowd", "delegation", "faction", "family",
  "government", "leadership", "majority", "minority", "opposition", "panel",
  "party", "public", "staff", "team", "union",
]);

/** Plurals that do not end in -s. */
export const IRREGULAR_PLURALS = new Set([
  "children", "clergy", "folk", "media", "men", "people", "personnel",
  "police", "spokesmen", "spokeswomen", "women",
]);

/** Singular nouns that happen to end in -s; never treated as plural. */
export const SINGULAR_S_WORDS = new Set([
  "caucus", "congress", "crisis", "press", "status",
]);

export const DETERMINERS = new Set([
  "a", "an", "another", "any", "both", "each", "every", "her", "his", "its",
  "my", "no", "other", "our", "several", "some", "that", "the", "their",
  "these", "this", "those", "your",
]);

/** Lowercase modifiers admitted into a phrase without capitalization. */
export const MODIFIER_ADJECTIVES = new Set([
  "conservative", "displaced", "federal", "foreign", "homeless", "junior",
  "liberal", "local", "military", "national", "political", "progressive",
  "regional", "senior", "top", "veteran", "western", "young",
]);

/**
 * Country and nationality surfaces. Relations touching one of these are
 * typed cn; mention NE components get the GPE label.
 */
export const GPE_SURFACES = new Set([
  "America", "American", "Americans", "Britain", "British", "Canada",
  "Canadian", "China", "Chinese", "France", "French", "Germany", "German",
  "Iran", "Iranian", "Israel", "Israeli", "Israelis", "Mexico", "Mexican",
  "Russia", "Russian", "U.S.", "U.K.", "United States",
]);

/** Organization and political-group surfaces; relations here are typed op. */
export const ORG_SURFACES = new Set([
  "Beltway", "Capitol", "Congress", "Democrat", "Democratic", "Democrats",
  "EU", "GOP", "House", "NATO", "Pentagon", "Republican", "Republicans",
  "Senate", "State Department", "UN", "White House",
]);

/** Sentence-ending abbreviation guards for the splitter. */
export const ABBREVIATIONS = new Set([
  "Dr.", "Gen.", "Gov.", "Jr.", "Mr.", "Mrs.", "Ms.", "Rep.", "Sen.", "St.",
]);

const stripPlural = (word: string): string => {
  if (word.endsWith("ies") && word.length > 4) return word.slice(0, -3) + "y";
  if (word.endsWith("es") && word.length > 3) {
    const stem = word.slice(0, -2);
    if (stem.endsWith("x") || stem.endsWith("s") || stem.endsWith("ch") || stem.endsWith("sh")) {
      return stem;
    }
  }
  if (word.endsWith("s") && word.length > 3) return word.slice(0, -1);
  return word;
};

/** True for plural-shaped tokens: -s forms plus listed irregulars. */
export function isPluralShaped(token: string): boolean {
  const lower = token.toLowerCase();
  if (IRREGULAR_PLURALS.has(lower)) return true;
  if (SINGULAR_S_WORDS.has(lower)) return false;
  return lower.endsWith("s") && lower.length > 3 && stripPlural(lower) !== lower;
}

/** Membership test against a stem set, tolerating plural inflection. */
export function inStemSet(token: string, stems: Set<string>): boolean {
  const lower = token.toLowerCase();
  if (stems.has(lower)) return true;
  if (IRREGULAR_PLURALS.has(lower)) {
    // men -> man, spokesmen -> spokesman, women -> woman
    if (lower.endsWith("men")) return stems.has(lower.slice(0, -3) + "man");
    if (lower === "people") return stems.has("person");
    return false;
  }
  return stems.has(stripPlural(lower));
}

/** GPE wins over ORG when a surface somehow appears in both lists. */
export function neLabel(surface: string): string {
  if (GPE_SURFACES.has(surface)) return "GPE";
  if (ORG_SURFACES.has(surface)) return "ORG";
  const first = surface.split(" ")[0] ?? surface;
  if (GPE_SURFACES.has(first)) return "GPE";
  return "ORG";
}

/** True when a surface names a country or nationality. */
export function isGpeSurface(surface: string): boolean {
  return neLabel(surface) === "GPE";
}

/** Known named-entity surface, for admitting sentence-initial capitals. */
export function inGazetteer(token: string): boolean {
  return GPE_SURFACES.has(token) || ORG_SURFACES.has(token);
}

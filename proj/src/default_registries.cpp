// Built-in answer surfaces and prompt templates. Same-language surfaces are
// hand-written label words for each of the 20 registered languages.

namespace xalign::detail {

extern const char* const kBuiltinSurfaces;
extern const char* const kBuiltinTemplates;

const char* const kBuiltinSurfaces = R"json({
  "emotion": {
    "english": {"*": {"positive": "positive", "negative": "negative"}},
    "task_agnostic": {"*": {"positive": "ox", "negative": "horse"}},
    "same_language": {
      "en": {"positive": "positive", "negative": "negative"},
      "zh": {"positive": "积极", "negative": "消极"},
      "de": {"positive": "positiv", "negative": "negativ"},
      "fr": {"positive": "positif", "negative": "négatif"},
      "es": {"positive": "positivo", "negative": "negativo"},
      "it": {"positive": "positivo", "negative": "negativo"},
      "nl": {"positive": "positief", "negative": "negatief"},
      "ja": {"positive": "ポジティブ", "negative": "ネガティブ"},
      "ru": {"positive": "положительный", "negative": "отрицательный"},
      "sv": {"positive": "positiv", "negative": "negativ"},
      "sl": {"positive": "pozitivno", "negative": "negativno"},
      "pl": {"positive": "pozytywny", "negative": "negatywny"},
      "bg": {"positive": "положителен", "negative": "отрицателен"},
      "no": {"positive": "positiv", "negative": "negativ"},
      "ms": {"positive": "positif", "negative": "negatif"},
      "is": {"positive": "jákvætt", "negative": "neikvætt"},
      "hi": {"positive": "सकारात्मक", "negative": "नकारात्मक"},
      "th": {"positive": "เชิงบวก", "negative": "เชิงลบ"},
      "sw": {"positive": "chanya", "negative": "hasi"},
      "bn": {"positive": "ইতিবাচক", "negative": "নেতিবাচক"}
    }
  },
  "nli": {
    "english": {"*": {"entailment": "entailment", "neutral": "neutral", "contradiction": "contradiction"}},
    "task_agnostic": {"*": {"entailment": "ox", "neutral": "horse", "contradiction": "sheep"}},
    "same_language": {
      "en": {"entailment": "entailment", "neutral": "neutral", "contradiction": "contradiction"},
      "zh": {"entailment": "蕴含", "neutral": "中立", "contradiction": "矛盾"},
      "de": {"entailment": "Folgerung", "neutral": "neutral", "contradiction": "Widerspruch"},
      "fr": {"entailment": "implication", "neutral": "neutre", "contradiction": "contradiction"},
      "es": {"entailment": "implicación", "neutral": "neutral", "contradiction": "contradicción"},
      "it": {"entailment": "implicazione", "neutral": "neutrale", "contradiction": "contraddizione"},
      "nl": {"entailment": "implicatie", "neutral": "neutraal", "contradiction": "tegenspraak"},
      "ja": {"entailment": "含意", "neutral": "中立", "contradiction": "矛盾"},
      "ru": {"entailment": "следствие", "neutral": "нейтрально", "contradiction": "противоречие"},
      "sv": {"entailment": "följd", "neutral": "neutral", "contradiction": "motsägelse"},
      "sl": {"entailment": "posledica", "neutral": "nevtralno", "contradiction": "protislovje"},
      "pl": {"entailment": "wynikanie", "neutral": "neutralny", "contradiction": "sprzeczność"},
      "bg": {"entailment": "следствие", "neutral": "неутрално", "contradiction": "противоречие"},
      "no": {"entailment": "følge", "neutral": "nøytral", "contradiction": "motsigelse"},
      "ms": {"entailment": "implikasi", "neutral": "neutral", "contradiction": "percanggahan"},
      "is": {"entailment": "afleiðing", "neutral": "hlutlaust", "contradiction": "mótsögn"},
      "hi": {"entailment": "अनुगमन", "neutral": "तटस्थ", "contradiction": "विरोधाभास"},
      "th": {"entailment": "ความเกี่ยวเนื่อง", "neutral": "เป็นกลาง", "contradiction": "ความขัดแย้ง"},
      "sw": {"entailment": "uthibitisho", "neutral": "kutoegemea", "contradiction": "mkanganyiko"},
      "bn": {"entailment": "অনুসিদ্ধান্ত", "neutral": "নিরপেক্ষ", "contradiction": "বৈপরীত্য"}
    }
  },
  "paraphrase": {
    "english": {"*": {"paraphrase": "yes", "not_paraphrase": "no"}},
    "task_agnostic": {"*": {"paraphrase": "ox", "not_paraphrase": "horse"}},
    "same_language": {
      "en": {"paraphrase": "yes", "not_paraphrase": "no"},
      "zh": {"paraphrase": "是", "not_paraphrase": "否"},
      "de": {"paraphrase": "ja", "not_paraphrase": "nein"},
      "fr": {"paraphrase": "oui", "not_paraphrase": "non"},
      "es": {"paraphrase": "sí", "not_paraphrase": "no"},
      "it": {"paraphrase": "sì", "not_paraphrase": "no"},
      "nl": {"paraphrase": "ja", "not_paraphrase": "nee"},
      "ja": {"paraphrase": "はい", "not_paraphrase": "いいえ"},
      "ru": {"paraphrase": "да", "not_paraphrase": "нет"},
      "sv": {"paraphrase": "ja", "not_paraphrase": "nej"},
      "sl": {"paraphrase": "da", "not_paraphrase": "ne"},
      "pl": {"paraphrase": "tak", "not_paraphrase": "nie"},
      "bg": {"paraphrase": "да", "not_paraphrase": "не"},
      "no": {"paraphrase": "ja", "not_paraphrase": "nei"},
      "ms": {"paraphrase": "ya", "not_paraphrase": "tidak"},
      "is": {"paraphrase": "já", "not_paraphrase": "nei"},
      "hi": {"paraphrase": "हाँ", "not_paraphrase": "नहीं"},
      "th": {"paraphrase": "ใช่", "not_paraphrase": "ไม่ใช่"},
      "sw": {"paraphrase": "ndiyo", "not_paraphrase": "hapana"},
      "bn": {"paraphrase": "হ্যাঁ", "not_paraphrase": "না"}
    }
  }
})json";

const char* const kBuiltinTemplates = R"json({
  "translate_default": {
    "instruction": "",
    "body": "Translate the following text from {src} to {tgt}.\n{src}: {question}\n{tgt}: "
  },
  "emotion_default": {
    "instruction": "Classify the sentiment of each review. Answer with {labels}.",
    "body": "Review: {question}\nAnswer: "
  },
  "nli_default": {
    "instruction": "Each input has a premise on the first line and a hypothesis on the second line. Decide how the premise relates to the hypothesis. Answer with {labels}.",
    "body": "Input:\n{question}\nAnswer: "
  },
  "paraphrase_default": {
    "instruction": "Each input has two sentences. Decide whether they are paraphrases of each other. Answer with {labels}.",
    "body": "Input:\n{question}\nAnswer: "
  }
})json";

}  // namespace xalign::detail

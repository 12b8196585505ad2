use std::path::PathBuf;

use proptest::prelude::*;
use tokeval::tokenizer::{load_tokenizer, Token, TokenizerModel};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn bytebpe() -> TokenizerModel {
    load_tokenizer(&data("toy_bytebpe.json")).unwrap()
}

fn greedy() -> TokenizerModel {
    load_tokenizer(&data("toy_greedy.json")).unwrap()
}

fn vocab_strings(model: &TokenizerModel) -> Vec<String> {
    (0..=u32::MAX)
        .map_while(|id| model.id_to_token(id).map(str::to_string))
        .collect()
}

#[test]
fn bundled_bytebpe_has_complete_byte_alphabet() {
    let model = bytebpe();
    for b in 0..=255u8 {
        let sym = tokeval::tokenizer::byte_to_unicode(b).to_string();
        assert!(model.token_to_id(&sym).is_some(), "byte {b:#04x}");
    }
}

#[test]
fn gold_word_uses_learned_merges() {
    let model = bytebpe();
    let ids = model.bpe_encode(" evlerimizden").unwrap();
    let pieces: Vec<&str> = ids.iter().map(|&i| model.id_to_token(i).unwrap()).collect();
    assert_eq!(pieces, ["Ġev", "ler", "imiz", "den"]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn bytebpe_roundtrip(text in "\\PC{0,40}") {
        let model = bytebpe();
        let tokens = model.encode(&text).unwrap();
        prop_assert_eq!(model.decode(&tokens).unwrap(), text.as_bytes());
    }

    #[test]
    fn bytebpe_roundtrip_any_scalar(chars in prop::collection::vec(any::<char>(), 0..30)) {
        let text: String = chars.into_iter().collect();
        let model = bytebpe();
        let tokens = model.encode(&text).unwrap();
        prop_assert_eq!(model.decode(&tokens).unwrap(), text.as_bytes());
    }

    #[test]
    fn greedy_takes_longest_prefix(piece in "[evlrimzdnokuağıçXx]{0,24}") {
        let model = greedy();
        let vocab = vocab_strings(&model);
        let tokens = model.greedy_encode(&piece).unwrap();
        let mut rest = piece.as_str();
        for t in tokens {
            let matched = match t {
                Token::Id(id) => model.id_to_token(id).unwrap().to_string(),
                Token::Unknown(c) => {
                    prop_assert!(!vocab.iter().any(|v| rest.starts_with(v.as_str())));
                    c.to_string()
                }
            };
            prop_assert!(rest.starts_with(&matched));
            let longest = vocab
                .iter()
                .filter(|v| rest.starts_with(v.as_str()))
                .map(|v| v.len())
                .max()
                .unwrap_or(0);
            if t.id().is_some() {
                prop_assert_eq!(matched.len(), longest);
            }
            rest = &rest[matched.len()..];
        }
        prop_assert!(rest.is_empty());
    }

    #[test]
    fn counts_add_across_whitespace_split(
        a in "[a-zçğıöşü.,0-9 ]{0,20}[a-zçğıöşü.,0-9]",
        b in "[ \t\n][a-zçğıöşü.,0-9 ]{0,20}",
    ) {
        for model in [bytebpe(), greedy()] {
            let whole = model.encode(&format!("{a}{b}")).unwrap().len();
            let parts = model.encode(&a).unwrap().len() + model.encode(&b).unwrap().len();
            prop_assert_eq!(whole, parts);
        }
    }

    #[test]
    fn encoding_is_deterministic(text in "\\PC{0,60}") {
        let (m1, m2) = (bytebpe(), bytebpe());
        prop_assert_eq!(m1.encode(&text).unwrap(), m2.encode(&text).unwrap());
        prop_assert_eq!(m1.encode(&text).unwrap(), m1.encode(&text).unwrap());
    }
}

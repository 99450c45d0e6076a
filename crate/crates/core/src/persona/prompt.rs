use super::{HumanFactor, Persona, PersonaError, PersonaMode, Result};

/// Preamble that is just the persona sentence.
pub const DEFAULT_PREAMBLE: &str = "{persona}";

const PLACEHOLDER: &str = "{persona}";

/// The predicate completing "You are ..." for one factor value.
pub fn explicit_clause(factor: HumanFactor, value: u32) -> String {
    let binary = |yes: &str, no: &str| if value == 1 { yes.to_string() } else { no.to_string() };
    match factor {
        HumanFactor::Age => format!("{value} years old"),
        HumanFactor::Gender => binary("female", "male"),
        HumanFactor::PoliticalIdeology => {
            binary("politically conservative", "politically liberal")
        }
        HumanFactor::Race => binary("Black / African American", "White / European American"),
        HumanFactor::SubstanceUse => binary(
            "a person who uses illegal drugs",
            "a person who does not use illegal drugs",
        ),
    }
}

fn persona_sentence(persona: &Persona, mode: PersonaMode, factors: &[HumanFactor]) -> Result<String> {
    let mut factors = factors.to_vec();
    factors.sort();
    factors.dedup();
    match mode {
        PersonaMode::Explicit => {
            if factors.is_empty() {
                return Ok(String::new());
            }
            let clauses = factors
                .iter()
                .map(|&f| {
                    persona
                        .value(f)
                        .map(|v| explicit_clause(f, v))
                        .ok_or(PersonaError::MissingFactor { persona: persona.id, factor: f })
                })
                .collect::<Result<Vec<_>>>()?;
            let joined = match clauses.as_slice() {
                [only] => format!("You are {only}"),
                [init @ .., last] => format!(
                    "You are {}, and you are {last}",
                    init.iter().map(String::as_str).collect::<Vec<_>>().join(", you are ")
                ),
                [] => unreachable!(),
            };
            Ok(format!("{joined}, please answer as such."))
        }
        PersonaMode::Implicit => {
            if let Some(&f) = factors.iter().find(|f| !f.supports_implicit()) {
                return Err(PersonaError::ImplicitUnsupported(f));
            }
            let name = persona
                .name
                .as_ref()
                .filter(|n| !n.first.is_empty())
                .ok_or(PersonaError::MissingName(persona.id))?;
            Ok(format!("Your name is {}.", name.full()))
        }
    }
}

/// Renders the persona part of a prompt.
///
/// `preamble_template` may contain `{persona}`, which is replaced by the
/// persona sentence; otherwise the sentence follows the preamble.
pub fn render_prompt(
    persona: &Persona,
    mode: PersonaMode,
    factors: &[HumanFactor],
    preamble_template: &str,
) -> Result<String> {
    let sentence = persona_sentence(persona, mode, factors)?;
    let text = if preamble_template.contains(PLACEHOLDER) {
        preamble_template.replace(PLACEHOLDER, &sentence)
    } else if sentence.is_empty() {
        preamble_template.to_string()
    } else if preamble_template.trim().is_empty() {
        sentence
    } else {
        format!("{} {sentence}", preamble_template.trim_end())
    };
    Ok(text.trim().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persona::PersonaName;
    use std::collections::BTreeMap;

    fn persona() -> Persona {
        Persona {
            id: 3,
            factors: BTreeMap::from([
                (HumanFactor::Age, 65),
                (HumanFactor::Gender, 1),
                (HumanFactor::PoliticalIdeology, 1),
                (HumanFactor::Race, 1),
                (HumanFactor::SubstanceUse, 1),
            ]),
            name: Some(PersonaName { first: "Mary".into(), surname: None, signal: HumanFactor::Gender }),
        }
    }

    #[test]
    fn explicit_age() {
        let text = render_prompt(&persona(), PersonaMode::Explicit, &[HumanFactor::Age], DEFAULT_PREAMBLE)
            .unwrap();
        assert!(text.contains("You are 65 years old"));
        assert_eq!(text, "You are 65 years old, please answer as such.");
    }

    #[test]
    fn explicit_phrasings() {
        let p = persona();
        let one = |f| render_prompt(&p, PersonaMode::Explicit, &[f], "").unwrap();
        assert!(one(HumanFactor::Gender).contains("You are female"));
        assert!(one(HumanFactor::PoliticalIdeology).contains("You are politically conservative"));
        assert!(one(HumanFactor::Race).contains("You are Black / African American"));
        assert!(one(HumanFactor::SubstanceUse).contains("You are a person who uses illegal drugs"));
    }

    #[test]
    fn implicit_name() {
        let text = render_prompt(&persona(), PersonaMode::Implicit, &[HumanFactor::Gender], "").unwrap();
        assert_eq!(text, "Your name is Mary.");
    }

    #[test]
    fn empty_subset_is_preamble_only() {
        let text = render_prompt(&persona(), PersonaMode::Explicit, &[], "Answer the question.").unwrap();
        assert_eq!(text, "Answer the question.");
        let text = render_prompt(&persona(), PersonaMode::Explicit, &[], "Intro. {persona}").unwrap();
        assert_eq!(text, "Intro.");
    }

    #[test]
    fn full_persona_sentence() {
        let text = render_prompt(&persona(), PersonaMode::Explicit, &HumanFactor::ALL, "").unwrap();
        assert_eq!(
            text,
            "You are 65 years old, you are female, you are politically conservative, \
             you are Black / African American, and you are a person who uses illegal drugs, \
             please answer as such."
        );
        assert_eq!(text.matches("ou are").count(), 5);
    }

    #[test]
    fn implicit_rejects_unsignalled_factors() {
        for f in [HumanFactor::PoliticalIdeology, HumanFactor::SubstanceUse] {
            let err = render_prompt(&persona(), PersonaMode::Implicit, &[f], "");
            assert!(matches!(err, Err(PersonaError::ImplicitUnsupported(_))));
        }
        let mut nameless = persona();
        nameless.name = None;
        let err = render_prompt(&nameless, PersonaMode::Implicit, &[HumanFactor::Age], "");
        assert!(matches!(err, Err(PersonaError::MissingName(3))));
    }
}

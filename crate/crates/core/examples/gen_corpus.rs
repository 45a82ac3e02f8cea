//! Regenerates `data/corpus/{docs,gold}.jsonl`.
//!
//! Documents are assembled from sentence templates, so every gold span is
//! known by construction. Run with `cargo run --example gen_corpus`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use propnames::mention::Method;
use propnames::pipeline::{write_records, AnnotationRecord, InputDocument};
use propnames::{bundled, KnowledgeBase};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1994;
const DOCS: usize = 64;

const FIRST: &[&str] = &[
    "André",
    "Jean",
    "Pierre",
    "Marie",
    "Michel",
    "Claire",
    "Sophie",
    "Alain",
    "Paul",
    "Henri",
    "Nicolas",
    "Catherine",
    "Isabelle",
    "Patrick",
    "Daniel",
    "Laurent",
    "Thierry",
    "Yves",
    "Gérard",
    "Sylvie",
    "Olivier",
];
const SURNAMES: &[&str] = &[
    "Blavier",
    "Peskine",
    "Fibaly",
    "Durandeau",
    "Ferrandi",
    "Lemarquis",
    "Vasseur",
    "Bertinot",
    "Kowalczyk",
    "Mazerolle",
    "Quintard",
    "Rossignac",
    "Tavernier",
    "Vidaloux",
    "Guillemont",
    "Hautecoeur",
    "Marchetti",
    "Pelissard",
    "Sauvanet",
    "Tronchet",
];
const STEMS: &[&str] = &[
    "Kyocera", "Sorelco", "Midavia", "Valtrex", "Norvane", "Ardexa", "Belmonte", "Cortiva",
    "Delvaux", "Estrelle", "Fabrimex", "Galvena", "Hydrosol", "Interlac", "Joliva", "Kermaria",
    "Lumiflex", "Metalsud", "Nordcap", "Optilux",
];
const PLACES: &[&str] = &[
    "Gisenyi",
    "Kibungo",
    "Ruhengeri",
    "Butare",
    "Gitarama",
    "Plouzané",
    "Vernoux",
    "Castelmaure",
    "Montbazin",
    "Lavaur",
    "Condé",
    "Brissac",
    "Montrichard",
];
const RIVERS: &[&str] = &["Huisne", "Loing", "Vézère", "Dronne", "Cher", "Indre"];
const LEGAL: &[&str] = &["Corp", "Inc", "Ltd", "SA", "GmbH", "AG", "plc", "Holding"];
const ACTIVITY: &[&str] = &[
    "Motors",
    "Electronics",
    "Chemicals",
    "Industries",
    "Systems",
    "Foods",
];
const APPOSITION: &[&str] = &[
    "director",
    "chairman",
    "spokesman",
    "president",
    "economist",
];
const ROLES: &[&str] = &["president", "director", "chairman"];
const WEEKDAYS: &[&str] = &["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"];
const TITLES: &[&str] = &["Mr", "Mrs"];

const ORG_HEADS: &[&str] = &[
    "Institut",
    "Agence",
    "Centre",
    "Office",
    "Association",
    "Fédération",
    "Conseil",
    "Comité",
];
const ADJ: &[&str] = &[
    "National",
    "Européen",
    "Régional",
    "Supérieur",
    "Central",
    "Technique",
];
const NOUNS: &[&str] = &[
    "Études",
    "Recherches",
    "Transports",
    "Métiers",
    "Céréales",
    "Ressources",
    "Pêches",
    "Travaux",
    "Échanges",
    "Produits",
];
const ADJ2: &[&str] = &[
    "Agricoles",
    "Maritimes",
    "Minières",
    "Alimentaires",
    "Forestières",
    "Portuaires",
];

const COMPANIES: &[&str] = &[
    "r:nissan",
    "r:honda",
    "r:toyota",
    "r:renault",
    "r:peugeot",
    "r:michelin",
    "r:elf-aquitaine",
    "r:total",
    "r:alcatel",
    "r:airbus",
    "r:air-france",
    "r:danone",
    "r:bouygues",
    "r:axa",
    "r:carrefour",
    "r:thomson",
    "r:paribas",
    "r:credit-lyonnais",
    "r:credit-agricole",
    "r:ibm",
    "r:societe-generale",
    "r:moodys",
];
const CAR_MAKERS: &[&str] = &["r:nissan", "r:honda", "r:toyota", "r:renault", "r:peugeot"];
const COUNTRIES: &[&str] = &[
    "r:france",
    "r:japan",
    "r:germany",
    "r:belgium",
    "r:italy",
    "r:spain",
    "r:thailand",
    "r:united-kingdom",
];
const CITIES: &[&str] = &[
    "r:paris",
    "r:lyon",
    "r:marseille",
    "r:lille",
    "r:bordeaux",
    "r:toulouse",
    "r:nantes",
    "r:tokyo",
    "r:london",
    "r:houston",
    "r:chicago",
    "r:frankfurt",
    "r:milan",
    "r:madrid",
];
const PEOPLE: &[&str] = &[
    "r:jacques-chirac",
    "r:edouard-balladur",
    "r:alain-juppe",
    "r:jacques-delors",
    "r:helmut-kohl",
    "r:bill-clinton",
    "r:bernard-tapie",
];
const ORGS: &[&str] = &["r:banque-de-france", "r:afp", "r:ocde", "r:fmi"];

struct Builder<'k> {
    kb: &'k KnowledgeBase,
    doc_id: String,
    text: String,
    gold: Vec<AnnotationRecord>,
    people: Vec<String>,
    companies: Vec<String>,
    acronyms: Vec<(String, &'static str)>,
}

impl<'k> Builder<'k> {
    fn t(&mut self, s: &str) -> &mut Self {
        self.text.push_str(s);
        self
    }

    fn n(&mut self, s: &str, category: &str, reference: Option<&str>) -> &mut Self {
        let start = self.text.len();
        self.text.push_str(s);
        self.gold.push(AnnotationRecord {
            doc_id: self.doc_id.clone(),
            start_byte: start,
            end_byte: self.text.len(),
            surface: s.to_string(),
            category: category.to_string(),
            reference_id: reference.map(str::to_string),
            confidence: 1.0,
            doubtful: false,
            method: Method::KnownForm,
        });
        self
    }

    /// A KB reference written with its canonical form.
    fn known(&mut self, id: &str) -> &mut Self {
        let kb = self.kb;
        let r = kb.reference(kb.reference_id(id).expect(id));
        let surface = kb.form_surface(r.canonical_form);
        let category = kb.category_name(r.category.unwrap()).to_string();
        self.n(&surface, &category, Some(id))
    }
}

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

fn initials(words: &[&str], kb: &KnowledgeBase) -> String {
    let skippable = kb.attribute_id("acronym-skippable").unwrap();
    words
        .iter()
        .filter(|w| {
            kb.resolve_word(w)
                .is_none_or(|id| !kb.word(id).has_attribute(skippable))
        })
        .map(|w| {
            propnames::text::fold_letters(w)
                .chars()
                .next()
                .unwrap()
                .to_ascii_uppercase()
        })
        .collect()
}

fn sentence<R: Rng>(b: &mut Builder<'_>, rng: &mut R) {
    match rng.gen_range(0..25) {
        0 | 1 => {
            b.known(pick(rng, PEOPLE)).t(" met ");
            let name = format!("{} {}", pick(rng, FIRST), pick(rng, SURNAMES));
            b.n(&name, "human-being", None)
                .t(" in ")
                .known(pick(rng, CITIES))
                .t(". ");
            b.people.push(name);
        }
        2 | 3 => {
            let (first, last) = (pick(rng, FIRST), pick(rng, SURNAMES));
            b.n(&format!("{first} {last}"), "human-being", None)
                .t(&format!(", {} of ", pick(rng, APPOSITION)))
                .known(pick(rng, COMPANIES))
                .t(&format!(
                    ", said on {} that sales rose. ",
                    pick(rng, WEEKDAYS)
                ));
            b.people.push(format!("{first} {last}"));
        }
        4 | 5 => {
            let stem = pick(rng, STEMS);
            b.n(&format!("{stem} {}", pick(rng, LEGAL)), "company", None)
                .t(&format!(
                    " reported a net profit of {} MF. ",
                    rng.gen_range(10..900)
                ));
            b.companies.push(stem.to_string());
        }
        6 => {
            let stem = pick(rng, STEMS);
            b.n(
                &format!("{stem} {} {}", pick(rng, ACTIVITY), pick(rng, LEGAL)),
                "company",
                None,
            )
            .t(" plans to invest in ")
            .known(pick(rng, COUNTRIES))
            .t(". ");
            b.companies.push(stem.to_string());
        }
        7 => {
            b.t("The mayor of ")
                .n(pick(rng, PLACES), "location", None)
                .t(" welcomed the decision. ");
        }
        8 => {
            b.n(pick(rng, SURNAMES), "human-being", None)
                .t(", a spokesman for ")
                .known(pick(rng, COMPANIES))
                .t(", declined to comment. ");
        }
        9 => {
            let name = format!("{} {}", pick(rng, TITLES), pick(rng, SURNAMES));
            b.n(&name, "human-being", None)
                .t(&format!(" was appointed {} of ", pick(rng, ROLES)))
                .known(pick(rng, ORGS))
                .t(". ");
        }
        10 => {
            let company = pick(
                rng,
                &["r:ibm", "r:nissan", "r:alcatel", "r:thomson", "r:axa"],
            );
            let kb = b.kb;
            let c = kb.form_surface(
                kb.reference(kb.reference_id(company).unwrap())
                    .canonical_form,
            );
            let l = pick(rng, &["France", "Japan", "Germany", "Belgium", "Italy"]);
            b.n(&format!("{c}-{l}"), "company", None)
                .t(" announced new contracts. ");
        }
        11 | 12 => {
            let words = acronym_expansion(rng);
            let acr = initials(&words.iter().map(String::as_str).collect::<Vec<_>>(), b.kb);
            if b.kb.resolve_word(&acr).is_some() || acr.len() < 3 {
                return;
            }
            let category = if words[0] == "Société" {
                "company"
            } else {
                "organization"
            };
            let expansion = words.join(" ");
            if rng.gen_bool(0.5) {
                b.t("The ")
                    .n(&expansion, category, None)
                    .t(" (")
                    .n(&acr, category, None)
                    .t(") published a report on ")
                    .known(pick(rng, COUNTRIES))
                    .t(". ");
            } else {
                b.t("The ")
                    .n(&acr, category, None)
                    .t(" (")
                    .n(&expansion, category, None)
                    .t(") met in ")
                    .known(pick(rng, CITIES))
                    .t(". ");
            }
            b.acronyms.push((acr, category));
        }
        13 => {
            b.n(pick(rng, PLACES), "location", None)
                .t(", a small town near ")
                .known(pick(rng, CITIES))
                .t(", was flooded. ");
        }
        14 => {
            let c1 = pick(rng, COMPANIES);
            let c2 = loop {
                let c = pick(rng, COMPANIES);
                if c != c1 {
                    break c;
                }
            };
            b.known(c1)
                .t(" and ")
                .known(c2)
                .t(" signed an agreement in ")
                .known(pick(rng, CITIES))
                .t(". ");
        }
        15 => {
            let stem = pick(rng, STEMS);
            b.n(&format!("{stem} {}", pick(rng, LEGAL)), "company", None)
                .t(", a subsidiary of ")
                .known(pick(rng, COMPANIES))
                .t(", cut jobs. ");
            b.companies.push(stem.to_string());
        }
        16 => {
            let name = format!("{}-sur-{}", pick(rng, PLACES), pick(rng, RIVERS));
            b.n(&name, "location", None).t(" hosted the meeting. ");
        }
        17 => {
            b.known(pick(rng, PEOPLE))
                .t(" visited ")
                .known(pick(rng, CITIES))
                .t(&format!(" on {}. ", pick(rng, WEEKDAYS)));
        }
        18 => {
            let maker = pick(rng, CAR_MAKERS);
            let kb = b.kb;
            let m = kb.form_surface(kb.reference(kb.reference_id(maker).unwrap()).canonical_form);
            let name = format!("{} {m} Automobile Co Ltd", pick(rng, STEMS));
            b.n(&name, "company", None)
                .t(", a subsidiary of ")
                .known(maker)
                .t(", opened a plant in ")
                .known(pick(rng, COUNTRIES))
                .t(". ");
        }
        19 => {
            let rater = pick(
                rng,
                &[
                    "Standard and Poor's",
                    "Standard et Poor's",
                    "Standard & Poor's",
                ],
            );
            b.n(rater, "company", Some("r:standard-and-poors"))
                .t(" downgraded ")
                .known(pick(rng, COMPANIES))
                .t(". ");
        }
        20 => {
            // recall of names introduced earlier
            if let Some(stem) = b.companies.choose(rng).cloned() {
                b.t("Shares of ").n(&stem, "company", None).t(" rose. ");
            } else if let Some(p) = b.people.choose(rng).cloned() {
                let last = p.rsplit(' ').next().unwrap().to_string();
                b.t("Later, ")
                    .n(&last, "human-being", None)
                    .t(" added that talks would resume. ");
            }
        }
        21 => {
            if let Some((acr, cat)) = b.acronyms.choose(rng).cloned() {
                b.t("The ")
                    .n(&acr, cat, None)
                    .t(" expects growth in ")
                    .known(pick(rng, COUNTRIES))
                    .t(". ");
            } else {
                b.t("Prices fell in ").known(pick(rng, CITIES)).t(". ");
            }
        }
        22 => {
            // prototype says person, truth is a company
            let name = format!("{} {}", pick(rng, FIRST), pick(rng, STEMS));
            b.n(&name, "company", None)
                .t(" opened a boutique in ")
                .known(pick(rng, CITIES))
                .t(". ");
        }
        23 => {
            // lowercase brand names carry no capital to detect
            let brand = pick(rng, STEMS).to_lowercase();
            b.t("Sales of ").n(&brand, "product", None).t(" doubled. ");
        }
        _ => {
            // a bare unknown surname with no context
            b.n(pick(rng, SURNAMES), "human-being", None)
                .t(" declined to comment. ");
        }
    }
}

fn acronym_expansion<R: Rng>(rng: &mut R) -> Vec<String> {
    let mut w: Vec<&str> = Vec::new();
    if rng.gen_bool(0.25) {
        w.push("Société");
    } else {
        w.push(pick(rng, ORG_HEADS));
    }
    if rng.gen_bool(0.5) {
        w.push(pick(rng, ADJ));
    }
    w.push(pick(rng, &["des", "de", "du"]));
    let noun = pick(rng, NOUNS);
    w.push(noun);
    if rng.gen_bool(0.5) {
        w.push(pick(rng, ADJ2));
    }
    w.into_iter().map(str::to_string).collect()
}

fn saint_louis_docs(kb: &KnowledgeBase) -> Vec<Builder<'_>> {
    let mk = |id: &str| Builder {
        kb,
        doc_id: id.to_string(),
        text: String::new(),
        gold: Vec::new(),
        people: Vec::new(),
        companies: Vec::new(),
        acronyms: Vec::new(),
    };
    let mut a = mk("saint-louis-hospital");
    a.t("Doctors at the ")
        .n(
            "Hôpital Saint Louis",
            "organization",
            Some("r:hopital-saint-louis"),
        )
        .t(" in ")
        .n("Paris", "location", Some("r:paris"))
        .t(" went on strike. Patients at ")
        .n("Saint Louis", "organization", Some("r:hopital-saint-louis"))
        .t(" were moved.");
    let mut b = mk("saint-louis-title");
    b.n("Saint Louis", "company", Some("r:saint-louis-food"))
        .t(": results up");
    let mut c = mk("saint-louis-mayor");
    c.t("He met the mayor of ")
        .n("St-Louis", "location", Some("r:saint-louis-missouri"))
        .t(" on Monday.");
    vec![a, b, c]
}

fn main() -> std::io::Result<()> {
    let kb = bundled::sample_kb().expect("sample KB");
    for w in FIRST.iter() {
        assert!(
            kb.resolve_word(w).is_some(),
            "first name {w} missing from KB"
        );
    }
    for pool in [SURNAMES, STEMS, PLACES, RIVERS, ADJ, NOUNS, ADJ2] {
        for w in pool {
            assert!(kb.resolve_word(w).is_none(), "{w} collides with a KB word");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut built = Vec::new();
    for i in 0..DOCS {
        let mut b = Builder {
            kb: &kb,
            doc_id: format!("synth-{i:03}"),
            text: String::new(),
            gold: Vec::new(),
            people: Vec::new(),
            companies: Vec::new(),
            acronyms: Vec::new(),
        };
        if rng.gen_bool(0.3) {
            b.known(pick(&mut rng, COMPANIES)).t(": results up\n\n");
        }
        for _ in 0..rng.gen_range(5..10) {
            sentence(&mut b, &mut rng);
        }
        b.text.truncate(b.text.trim_end().len());
        built.push(b);
    }
    built.extend(saint_louis_docs(&kb));

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/corpus");
    std::fs::create_dir_all(&dir)?;
    let mut docs = BufWriter::new(File::create(dir.join("docs.jsonl"))?);
    let mut gold = BufWriter::new(File::create(dir.join("gold.jsonl"))?);
    let mut mentions = 0;
    for b in &built {
        let doc = InputDocument {
            doc_id: b.doc_id.clone(),
            text: b.text.clone(),
        };
        serde_json::to_writer(&mut docs, &doc)?;
        docs.write_all(b"\n")?;
        write_records(&mut gold, &b.gold)?;
        mentions += b.gold.len();
    }
    println!("{} documents, {mentions} gold mentions", built.len());
    Ok(())
}

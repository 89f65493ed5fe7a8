//! Random knowledge bases, frames and dialogues, plus a brute-force evaluator
//! that works on the generator's own model rather than on a loaded KB.

#![allow(dead_code)]

use coopq_core::kb::{ClockTime, Value};
use coopq_core::query::{Binding, Constraint, QueryElement, QueryFrame, Relation};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Entities in declaration order, each with its facts.
#[derive(Debug, Clone)]
pub struct Model {
    pub entities: Vec<(String, Vec<(String, Value)>)>,
}

impl Model {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (id, facts) in &self.entities {
            out.push_str(&format!("entity({id}).\n"));
            for (attr, value) in facts {
                let v = match value {
                    Value::Text(s) => format!("\"{s}\""),
                    Value::ClockTime(t) => t.padded(),
                    other => other.to_string(),
                };
                out.push_str(&format!("property({id}, {attr}, {v}).\n"));
            }
        }
        out
    }

    fn get(&self, id: &str, attr: &str) -> Option<&Value> {
        self.entities
            .iter()
            .find(|(e, _)| e == id)
            .and_then(|(_, facts)| facts.iter().find(|(a, _)| a == attr))
            .map(|(_, v)| v)
    }
}

pub fn random_time(rng: &mut impl Rng) -> ClockTime {
    ClockTime::from_hm(rng.random_range(0..24), rng.random_range(0..4) * 15).unwrap()
}

const ATTRIBUTES: [&str; 8] = ["type", "startpoint", "endpoint", "starttime", "endtime", "colour", "name", "size"];
const TYPES: [&str; 3] = ["flight", "bus", "city"];
const COLOURS: [&str; 3] = ["red", "blue", "reef_green"];

fn random_value(rng: &mut impl Rng, attr: &str, n_entities: usize) -> Value {
    match attr {
        "type" => Value::symbol(TYPES.choose(rng).unwrap()),
        "startpoint" | "endpoint" => Value::entity(&format!("e{}", rng.random_range(0..n_entities))),
        "starttime" | "endtime" => Value::ClockTime(random_time(rng)),
        "colour" => Value::symbol(COLOURS.choose(rng).unwrap()),
        "name" => Value::text(&format!("N{}", rng.random_range(0..5))),
        _ => Value::symbol(["small", "large"].choose(rng).unwrap()),
    }
}

/// Up to 20 entities over up to 6 attributes; facts are dropped at random.
pub fn random_model(rng: &mut impl Rng) -> Model {
    let n = rng.random_range(1..=20);
    let n_attrs = rng.random_range(1..=6);
    let mut attrs: Vec<&str> = ATTRIBUTES.to_vec();
    // type is always among the attributes so type constraints have something to hit
    attrs.retain(|a| *a != "type");
    let mut chosen = vec!["type"];
    while chosen.len() < n_attrs {
        let i = rng.random_range(0..attrs.len());
        chosen.push(attrs.remove(i));
    }
    let entities = (0..n)
        .map(|i| {
            let mut facts = Vec::new();
            for a in &chosen {
                if rng.random_bool(0.85) {
                    facts.push((a.to_string(), random_value(rng, a, n)));
                }
            }
            (format!("e{i}"), facts)
        })
        .collect();
    Model { entities }
}

/// Constraints are biased toward `target`'s own facts so that conjunctions
/// have solutions reasonably often.
fn random_constraint(rng: &mut impl Rng, model: &Model, target: &str, attr: &str) -> Option<Constraint> {
    // absent attributes exclude every entity, so constrain them rarely
    let none_p = if model.get(target, attr).is_some() { 0.3 } else { 0.85 };
    if rng.random_bool(none_p) {
        return None;
    }
    let value = match model.get(target, attr) {
        Some(v) if rng.random_bool(0.7) => v.clone(),
        _ => random_value(rng, attr, model.entities.len()),
    };
    let clocky = matches!(attr, "starttime" | "endtime");
    match (clocky, rng.random_range(0..3), value) {
        (true, 0, Value::ClockTime(t)) => {
            Some(Constraint::before(ClockTime::from_hm((t.hours() + 1).min(23), t.minutes()).unwrap()))
        }
        (true, 1, Value::ClockTime(t)) => {
            Some(Constraint::after(ClockTime::from_hm(t.hours().saturating_sub(1), t.minutes()).unwrap()))
        }
        (_, _, v) => Some(Constraint::eq(v)),
    }
}

pub fn random_frame(rng: &mut impl Rng, model: &Model) -> QueryFrame {
    let target = model.entities[rng.random_range(0..model.entities.len())].0.clone();
    let mut elements = vec![
        QueryElement::new("entity", "E", None),
        QueryElement::new("type", "T", random_constraint(rng, model, &target, "type")),
    ];
    for (i, attr) in ATTRIBUTES[1..].iter().chain(&["platform"]).enumerate() {
        let p = if *attr == "platform" { 0.1 } else { 0.5 };
        if rng.random_bool(p) {
            let given = if *attr == "platform" {
                Some(Constraint::eq(Value::symbol("p1")))
            } else {
                random_constraint(rng, model, &target, attr)
            };
            elements.push(QueryElement::new(attr, &format!("V{i}"), given));
        }
    }
    QueryFrame::new(elements).unwrap()
}

fn holds(c: &Constraint, v: &Value) -> bool {
    match (c.relation(), c.bound(), v) {
        (Relation::Eq, b, v) => b == v,
        (Relation::Lt, Value::ClockTime(b), Value::ClockTime(v)) => v.hhmm() < b.hhmm(),
        (Relation::Gt, Value::ClockTime(b), Value::ClockTime(v)) => v.hhmm() > b.hhmm(),
        _ => false,
    }
}

/// Every entity against every element, by hand.
pub fn brute_force(model: &Model, frame: &QueryFrame) -> Vec<Binding> {
    let mut out = Vec::new();
    'entities: for (id, _) in &model.entities {
        let mut binding = Binding::new();
        for e in frame.elements() {
            let value = if e.attribute() == "entity" {
                Some(Value::entity(id.as_str()))
            } else {
                model.get(id, e.attribute().as_str()).cloned()
            };
            if let Some(c) = e.given() {
                match &value {
                    Some(v) if holds(c, v) => {}
                    _ => continue 'entities,
                }
            }
            if let Some(v) = value {
                binding.insert(e.variable().to_string(), v);
            }
        }
        out.push(binding);
    }
    out
}

const CITY_NAMES: [&str; 6] = ["Sydney", "Melbourne", "Hobart", "Perth", "Alice Springs", "Darwin"];
const VEHICLES: [&str; 2] = ["flight", "bus"];

/// A small transport world: cities c0.., and services between them.
pub struct World {
    pub model: Model,
    pub cities: Vec<&'static str>,
}

pub fn random_world(rng: &mut impl Rng) -> World {
    let n_cities = rng.random_range(2..=CITY_NAMES.len());
    let cities: Vec<&'static str> = CITY_NAMES[..n_cities].to_vec();
    let mut entities = Vec::new();
    let n_services = rng.random_range(1..=12);
    for i in 0..n_services {
        let mut facts = vec![
            ("type".to_string(), Value::symbol(VEHICLES.choose(rng).unwrap())),
            ("name".to_string(), Value::text(&format!("QF{}", 100 + i))),
            ("startpoint".to_string(), Value::entity(&format!("c{}", rng.random_range(0..n_cities)))),
            ("endpoint".to_string(), Value::entity(&format!("c{}", rng.random_range(0..n_cities)))),
        ];
        if rng.random_bool(0.9) {
            facts.push(("starttime".to_string(), Value::ClockTime(random_time(rng))));
        }
        if rng.random_bool(0.7) {
            facts.push(("endtime".to_string(), Value::ClockTime(random_time(rng))));
        }
        entities.push((format!("s{i}"), facts));
    }
    for (i, name) in cities.iter().enumerate() {
        entities.push((
            format!("c{i}"),
            vec![
                ("type".to_string(), Value::symbol("city")),
                ("name".to_string(), Value::text(name)),
            ],
        ));
    }
    World {
        model: Model { entities },
        cities,
    }
}

/// Render a time the way a user might type it.
pub fn spoken_time(rng: &mut impl Rng, t: ClockTime) -> String {
    if rng.random_bool(0.2) {
        return t.padded();
    }
    let suffix = if t.hours() < 12 { "am" } else { "pm" };
    let hour = match t.hours() % 12 {
        0 => 12,
        h => h,
    };
    if t.minutes() == 0 {
        format!("{hour}{suffix}")
    } else {
        format!("{hour}{:02}{suffix}", t.minutes())
    }
}

pub fn random_question(rng: &mut impl Rng, world: &World) -> String {
    let vehicle = VEHICLES.choose(rng).unwrap();
    let to = world.cities.choose(rng).unwrap();
    let mut q = format!("Is there a {vehicle}");
    if rng.random_bool(0.5) {
        q.push_str(&format!(" from {}", world.cities.choose(rng).unwrap()));
    }
    q.push_str(&format!(" to {to}"));
    if rng.random_bool(0.8) {
        let rel = if rng.random_bool(0.7) { "before" } else { "after" };
        let t = random_time(rng);
        q.push_str(&format!(" {rel} {}", spoken_time(rng, t)));
    }
    q.push('?');
    q
}

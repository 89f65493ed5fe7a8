//! Reference data: the flight knowledge base used throughout the examples
//! and tests.

/// One Sydney to Melbourne flight and its two cities.
pub const FLIGHTS_KB: &str = "\
entity(qf400).
property(qf400, type, flight).
property(qf400, name, \"QF400\").
property(qf400, startpoint, s1).
property(qf400, endpoint, m1).
property(qf400, starttime, 0715).
property(qf400, endtime, 0830).
entity(s1).
property(s1, type, city).
property(s1, name, \"Sydney\").
entity(m1).
property(m1, type, city).
property(m1, name, \"Melbourne\").
";

/// [`FLIGHTS_KB`] plus a second Sydney–Melbourne flight leaving at 0930.
pub const TWO_FLIGHTS_KB: &str = "\
entity(qf400).
property(qf400, type, flight).
property(qf400, name, \"QF400\").
property(qf400, startpoint, s1).
property(qf400, endpoint, m1).
property(qf400, starttime, 0715).
property(qf400, endtime, 0830).
entity(qf402).
property(qf402, type, flight).
property(qf402, name, \"QF402\").
property(qf402, startpoint, s1).
property(qf402, endpoint, m1).
property(qf402, starttime, 0930).
property(qf402, endtime, 1045).
entity(s1).
property(s1, type, city).
property(s1, name, \"Sydney\").
entity(m1).
property(m1, type, city).
property(m1, name, \"Melbourne\").
";

/// Jumpers and a cardigan for the pronoun / one-anaphor / definite NP contrasts.
pub const WARDROBE_KB: &str = "\
entity(x1).
property(x1, type, jumper).
property(x1, colour, red).
entity(x2).
property(x2, type, jumper).
property(x2, colour, blue).
entity(y1).
property(y1, type, cardigan).
property(y1, colour, blue).
";

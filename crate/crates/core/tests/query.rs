mod common;

use std::collections::BTreeMap;

use grafion_core::algorithms::{pagerank, PageRankConfig};
use grafion_core::query::{self, ExecContext, Params, QueryError, RowSet, Value};
use grafion_core::{props, PropertyGraph, PropertyValue};

use common::corpus::CORPUS;

fn run(g: &mut PropertyGraph, q: &str) -> RowSet {
    query::run(g, q, &Params::new(), &ExecContext::default()).unwrap_or_else(|e| panic!("{q}: {e}"))
}

fn try_run(g: &mut PropertyGraph, q: &str) -> Result<RowSet, QueryError> {
    query::run(g, q, &Params::new(), &ExecContext::default())
}

fn text(s: &str) -> Value {
    Value::Text(s.to_string())
}

fn two_people() -> PropertyGraph {
    let mut g = PropertyGraph::directed();
    run(&mut g, "CREATE (a:Person {name: 'Alice'})\nCREATE (b:Person {name: 'Bob'})");
    g
}

#[test]
fn corpus_parses_and_prints_back() {
    for q in CORPUS {
        let stmt = query::parse(q).unwrap_or_else(|e| panic!("{q:?}: {e}"));
        let printed = stmt.to_string();
        assert_eq!(query::parse(&printed).unwrap(), stmt, "{printed}");
    }
}

#[test]
fn batched_import_listing_is_not_a_procedure() {
    let q = "CALL apoc.periodic.iterate(\n  \"LOAD CSV WITH HEADERS FROM 'file:///large_data.csv' AS row RETURN row\",\n  \"CREATE (:Entity {id: row.id, name: row.name, value: row.value})\",\n  {batchSize: 1000, parallel: true}\n)";
    assert!(matches!(query::parse(q), Err(QueryError::UnknownProcedure { offset: Some(5), .. })));
}

#[test]
fn name_projection() {
    let mut g = two_people();
    let rs = run(&mut g, "MATCH (n:Person) RETURN n.name AS name");
    assert_eq!(rs.columns, ["name"]);
    assert_eq!(rs.rows, vec![vec![text("Alice")], vec![text("Bob")]]);
    let rs = run(&mut g, "MATCH (n:Person) RETURN n");
    assert!(matches!(&rs.rows[0][0], Value::Node(n) if n.get("name") == Some(&PropertyValue::text("Alice"))));
}

#[test]
fn relationship_creation() {
    let mut g = two_people();
    let rs = run(&mut g, "MATCH (a:Person {name: 'Alice'}), (b:Person {name: 'Bob'})\nCREATE (a)-[:FRIEND]->(b)");
    assert_eq!(rs.summary.relationships_created, 1);
    assert!(rs.columns.is_empty() && rs.rows.is_empty());
    let rs = run(&mut g, "MATCH (a)-[r:FRIEND]->(b) RETURN a.name, b.name");
    assert_eq!(rs.columns, ["a.name", "b.name"]);
    assert_eq!(rs.rows, vec![vec![text("Alice"), text("Bob")]]);
    // The undirected form matches from both ends.
    let rs = run(&mut g, "MATCH (a)-[:FRIEND]-(b) RETURN a.name");
    assert_eq!(rs.rows.len(), 2);
}

#[test]
fn fraud_query_selects_one_transfer() {
    let mut g = PropertyGraph::directed();
    run(
        &mut g,
        "CREATE (a:Account {name: 'a', region: 'EU'}), (b:Account {name: 'b', region: 'US'}), (c:Account {name: 'c', region: 'EU'})
         CREATE (a)-[:TRANSFER {amount: 15000}]->(b)
         CREATE (a)-[:TRANSFER {amount: 20000}]->(c)
         CREATE (b)-[:TRANSFER {amount: 500}]->(c)",
    );
    let rs = run(&mut g, CORPUS[28]);
    assert_eq!(rs.columns, ["a", "b", "t.amount"]);
    assert_eq!(rs.rows.len(), 1);
    assert_eq!(rs.rows[0][2], Value::Int(15000));
}

#[test]
fn wcc_components() {
    let mut g = PropertyGraph::directed();
    for i in 1..=5 {
        g.add_node(["Node"], props([("name", i)]));
    }
    // Node ids are 0..5 for names 1..5.
    for (a, b) in [(0, 1), (1, 2), (3, 4)] {
        g.add_edge(a, b, "CONNECTS", props::<&str, i64, _>([])).unwrap();
    }
    let rs = run(&mut g, CORPUS[15]);
    assert_eq!(rs.columns, ["componentId", "nodeName"]);
    let mut groups: BTreeMap<String, Vec<i64>> = BTreeMap::new();
    for row in &rs.rows {
        let Value::Int(name) = row[1] else { panic!() };
        groups.entry(row[0].to_string()).or_default().push(name);
    }
    let mut groups: Vec<Vec<i64>> = groups.into_values().collect();
    groups.sort();
    assert_eq!(groups, vec![vec![1, 2, 3], vec![4, 5]]);
}

fn abc_graph() -> PropertyGraph {
    let mut g = PropertyGraph::undirected();
    run(
        &mut g,
        "CREATE (a:Location {name: 'A'}), (b:Location {name: 'B'}), (c:Location {name: 'C'})
         CREATE (a)-[:ROAD {distance: 5}]->(c), (c)-[:ROAD {distance: 5}]->(b), (a)-[:ROAD {distance: 12}]->(b)",
    );
    g
}

#[test]
fn dijkstra_stream() {
    let mut g = abc_graph();
    let rs = run(&mut g, CORPUS[11]);
    assert_eq!(rs.columns, ["node", "cost"]);
    assert_eq!(
        rs.rows,
        vec![
            vec![text("A"), Value::Float(0.0)],
            vec![text("C"), Value::Float(5.0)],
            vec![text("B"), Value::Float(10.0)],
        ]
    );
}

#[test]
fn shortest_path_pattern() {
    let mut g = PropertyGraph::undirected();
    run(
        &mut g,
        "CREATE (a:Node {name: 'A'}), (x:Node {name: 'X'}), (y:Node {name: 'Y'}), (b:Node {name: 'B'})
         CREATE (a)-[:CONNECTS]->(x), (x)-[:CONNECTS]->(y), (y)-[:CONNECTS]->(b), (a)-[:CONNECTS]->(y)",
    );
    let rs = run(&mut g, CORPUS[13]);
    let Value::Path { nodes, edges } = &rs.rows[0][0] else { panic!("{:?}", rs.rows) };
    let names: Vec<String> = nodes.iter().map(|n| n.get("name").unwrap().to_string()).collect();
    assert_eq!(names, ["A", "Y", "B"]);
    assert_eq!(edges.len(), 2);
    // Removing the edge the listing names leaves the graph disconnected.
    let mut d = PropertyGraph::directed();
    run(&mut d, "CREATE (a:Node {name: 'A'}), (b:Node {name: 'B'}) CREATE (a)-[:CONNECTS]->(b)");
    let rs = run(&mut d, CORPUS[14]);
    assert_eq!(rs.summary.relationships_deleted, 1);
    assert!(run(&mut d, CORPUS[13]).rows.is_empty());
}

#[test]
fn pagerank_stream_matches_library() {
    let mut g = PropertyGraph::directed();
    for name in ["A", "B", "C", "D"] {
        g.add_node(["Page"], props([("name", name)]));
    }
    for (a, b) in [(0, 1), (0, 2), (1, 2), (2, 0), (3, 2)] {
        g.add_edge(a, b, "LINKS", props::<&str, i64, _>([])).unwrap();
    }
    let expected = pagerank(&g, &PageRankConfig::default()).unwrap();
    let rs = run(&mut g, CORPUS[25]);
    assert_eq!(rs.columns, ["Name", "score"]);
    let mut last = f64::INFINITY;
    for row in &rs.rows {
        let Value::Text(name) = &row[0] else { panic!() };
        let Value::Float(score) = row[1] else { panic!() };
        let id = ["A", "B", "C", "D"].iter().position(|n| n == name).unwrap() as u64;
        assert!((score - expected[&id]).abs() < 1e-4);
        assert!(score <= last);
        last = score;
    }
}

#[test]
fn louvain_stream_two_cliques() {
    let mut g = PropertyGraph::directed();
    for i in 0..6 {
        g.add_node(["P"], props([("name", format!("n{i}"))]));
    }
    for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)] {
        g.add_edge(a, b, "KNOWS", props::<&str, i64, _>([])).unwrap();
    }
    let rs = run(&mut g, CORPUS[26]);
    let community: Vec<i64> = rs.rows.iter().map(|r| if let Value::Int(c) = r[1] { c } else { panic!() }).collect();
    let by_name: BTreeMap<String, i64> = rs.rows.iter().map(|r| r[0].to_string()).zip(community.iter().copied()).collect();
    assert_eq!(by_name["n0"], by_name["n1"]);
    assert_eq!(by_name["n1"], by_name["n2"]);
    assert_eq!(by_name["n3"], by_name["n5"]);
    assert_ne!(by_name["n0"], by_name["n3"]);
    assert!(community.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn degree_query() {
    let mut g = PropertyGraph::directed();
    run(
        &mut g,
        "CREATE (a:Person {name: 'Ann'}), (b:Person {name: 'Ben'}), (c:Person {name: 'Cat'}), (d:Person {name: 'Dan'})
         CREATE (a)-[:FRIENDS_WITH]->(b), (a)-[:FRIENDS_WITH]->(c), (d)-[:FRIENDS_WITH]->(a), (b)-[:FRIENDS_WITH]->(c)",
    );
    let rs = run(&mut g, CORPUS[24]);
    assert_eq!(rs.columns, ["Name", "DegreeCentrality"]);
    assert_eq!(rs.rows[0], vec![text("Ann"), Value::Int(3)]);
    let rest: Vec<(String, Value)> = rs.rows[1..].iter().map(|r| (r[0].to_string(), r[1].clone())).collect();
    assert_eq!(
        rest,
        [("Ben".into(), Value::Int(2)), ("Cat".into(), Value::Int(2)), ("Dan".into(), Value::Int(1))]
    );
}

#[test]
fn collaborative_filtering() {
    let mut g = PropertyGraph::directed();
    run(
        &mut g,
        "CREATE (u1:User {name: 'U1'}), (u2:User {name: 'U2'}), (u3:User {name: 'U3'}),
                (m1:Movie {t: 1}), (m2:Movie {t: 2}), (m3:Movie {t: 3})
         CREATE (u1)-[:RATED]->(m1), (u1)-[:RATED]->(m2), (u1)-[:RATED]->(m3),
                (u2)-[:RATED]->(m1), (u2)-[:RATED]->(m2), (u3)-[:RATED]->(m3)",
    );
    let rs = run(&mut g, "MATCH (u:User {name: 'U1'})-[:RATED]->(m:Movie) RETURN collect(m) AS ms");
    assert!(matches!(&rs.rows[0][0], Value::List(ms) if ms.len() == 3));
    let rs = run(&mut g, CORPUS[27]);
    assert_eq!(rs.columns, ["SimilarUser", "SharedInterests"]);
    // Brute force: for each pair (u, u2) with u != u2, count u2's ratings of
    // movies u rated; the query sums over all u.
    let ratings = [(0, 3), (0, 4), (0, 5), (1, 3), (1, 4), (2, 5)];
    let mut expected: BTreeMap<i64, i64> = BTreeMap::new();
    for u in 0..3 {
        for &(u2, m2) in &ratings {
            if u2 != u && ratings.contains(&(u, m2)) {
                *expected.entry(u2).or_default() += 1;
            }
        }
    }
    let got: BTreeMap<i64, i64> = rs
        .rows
        .iter()
        .map(|r| {
            let Value::Text(n) = &r[0] else { panic!() };
            let Value::Int(c) = r[1] else { panic!() };
            (n[1..].parse::<i64>().unwrap() - 1, c)
        })
        .collect();
    assert_eq!(got, expected);
    let counts: Vec<&Value> = rs.column("SharedInterests").unwrap();
    assert!(counts.windows(2).all(|w| matches!((w[0], w[1]), (Value::Int(a), Value::Int(b)) if a >= b)));
}

#[test]
fn union_difference_intersection() {
    let mut g = PropertyGraph::directed();
    run(
        &mut g,
        "CREATE (a:Person {name: 'a'}), (b:Person {name: 'b'}), (c:Person {name: 'c'})
         CREATE (a)-[:KNOWS]->(b), (b)-[:KNOWS]->(c), (a)-[:COLLEAGUES]->(b), (a)-[:FRIENDS]->(b), (c)-[:FRIENDS]->(a)",
    );
    let rs = run(&mut g, CORPUS[20]);
    let names: Vec<String> = rs.rows.iter().map(|r| match &r[0] { Value::Node(n) => n.get("name").unwrap().to_string(), _ => panic!() }).collect();
    // collect(DISTINCT a) over a in [a, b, b, c] then collect(DISTINCT b) over [b, a, c, b].
    assert_eq!(names, ["a", "b", "c", "b", "a", "c"]);
    let rs = run(&mut g, "MATCH (a)-[r:FRIENDS]-(b)\nWHERE (a)-[:COLLEAGUES]-(b)\nRETURN a.name, b.name");
    assert_eq!(rs.rows, vec![vec![text("a"), text("b")], vec![text("b"), text("a")]]);
    let rs = run(&mut g, "MATCH (a)-[r:KNOWS]-(b)\nWHERE NOT (a)-[:COLLEAGUES]-(b)\nRETURN a.name, b.name");
    assert_eq!(rs.rows, vec![vec![text("b"), text("c")], vec![text("c"), text("b")]]);
}

#[test]
fn mutation_listings() {
    let mut g = PropertyGraph::directed();
    run(&mut g, "CREATE (b:Person {name: 'Bob'})");
    let rs = run(&mut g, CORPUS[16]);
    assert_eq!((rs.summary.nodes_created, rs.summary.relationships_created, rs.summary.properties_set), (1, 1, 2));
    let rs = run(&mut g, CORPUS[18]);
    assert_eq!(rs.summary.properties_set, 2);
    let rs = run(&mut g, "MATCH (a:Person {name: 'Alice'})-[r:KNOWS]->(b) RETURN a.age, r.since");
    assert_eq!(rs.rows, vec![vec![Value::Int(31), Value::Int(2021)]]);
    let rs = run(&mut g, CORPUS[17]);
    assert_eq!((rs.summary.nodes_deleted, rs.summary.relationships_deleted), (1, 1));
    assert_eq!((g.node_count(), g.edge_count()), (1, 0));
    // Plain DELETE refuses a node that still has edges and leaves the graph as it was.
    run(&mut g, "CREATE (x:T)-[:R]->(y:T)");
    let before = g.fingerprint();
    assert!(matches!(try_run(&mut g, "MATCH (x:T) DELETE x"), Err(QueryError::Graph(_))));
    assert_eq!(g.fingerprint(), before);
}

#[test]
fn load_csv_and_export() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("people.csv"), "name,age,city\nAlice,30,New York\nBob,25,Los Angeles\n").unwrap();
    let ctx = ExecContext { import_dir: Some(dir.path().to_path_buf()) };
    let mut g = PropertyGraph::directed();
    let rs = query::run(&mut g, CORPUS[4], &Params::new(), &ctx).unwrap();
    assert_eq!(rs.summary.nodes_created, 2);
    assert_eq!(rs.summary.properties_set, 6);
    let rs = query::run(&mut g, "MATCH (p:Person) RETURN p.age, p.city ORDER BY p.age", &Params::new(), &ctx).unwrap();
    assert_eq!(rs.rows, vec![vec![Value::Int(25), text("Los Angeles")], vec![Value::Int(30), text("New York")]]);

    let rs = query::run(&mut g, CORPUS[5], &Params::new(), &ctx).unwrap();
    assert_eq!(rs.columns, ["file", "nodes", "relationships"]);
    assert_eq!(rs.rows[0][1], Value::Int(2));
    let written = std::fs::read_to_string(dir.path().join("exported_graph.csv")).unwrap();
    assert_eq!(written.lines().next().unwrap(), "_id;_labels;age;city;name;_start;_end;_type");
    assert!(written.contains("30:int"));

    let missing = query::run(&mut g, "LOAD CSV WITH HEADERS FROM 'file:///nope.csv' AS r RETURN r", &Params::new(), &ctx);
    assert!(matches!(missing, Err(QueryError::FileNotFound(_))));
}

#[test]
fn scalar_functions() {
    let mut g = PropertyGraph::directed();
    let rs = run(&mut g, "RETURN toInteger('30') AS a, toInteger('abc') AS b, toInteger(2.9) AS c, toFloat('1.5') AS d, toString(7) AS e");
    assert_eq!(rs.rows, vec![vec![Value::Int(30), Value::Null, Value::Int(2), Value::Float(1.5), text("7")]]);
    let rs = run(&mut g, "RETURN 1 AS x");
    assert_eq!((rs.columns.clone(), rs.rows.clone()), (vec!["x".to_string()], vec![vec![Value::Int(1)]]));
    let rs = run(&mut g, "UNWIND [3, 1, 2] AS x RETURN count(*) AS n, collect(x) AS xs");
    assert_eq!(rs.rows, vec![vec![Value::Int(3), Value::List(vec![Value::Int(3), Value::Int(1), Value::Int(2)])]]);
    let rs = run(&mut g, "MATCH (n) RETURN count(n) AS n");
    assert_eq!(rs.rows, vec![vec![Value::Int(0)]]);
    let rs = run(&mut g, "MATCH (n) RETURN n.name AS k, count(n) AS n");
    assert!(rs.rows.is_empty());
}

#[test]
fn null_semantics_and_ordering() {
    let mut g = PropertyGraph::directed();
    run(&mut g, "CREATE (:P {v: 2}), (:P), (:P {v: 1}), (:P {v: 'x'})");
    let rs = run(&mut g, "MATCH (n:P) WHERE n.v > 0 RETURN n.v");
    assert_eq!(rs.rows, vec![vec![Value::Int(2)], vec![Value::Int(1)]]);
    let rs = run(&mut g, "MATCH (n:P) WHERE n.v = 2 OR n.v IS NULL RETURN id(n) AS i ORDER BY i DESC");
    assert_eq!(rs.rows, vec![vec![Value::Int(1)], vec![Value::Int(0)]]);
    assert!(matches!(try_run(&mut g, "MATCH (n:P) RETURN n.v ORDER BY n.v"), Err(QueryError::TypeMismatch(_))));
    let rs = run(&mut g, "MATCH (n:P) WHERE n.v IS NULL OR n.v < 5 RETURN n.v ORDER BY n.v DESC");
    assert_eq!(rs.rows, vec![vec![Value::Int(2)], vec![Value::Int(1)], vec![Value::Null]]);
    let rs = run(&mut g, "MATCH (n:P) RETURN DISTINCT labels(n) AS l");
    assert_eq!(rs.rows.len(), 1);
    let rs = run(&mut g, "MATCH (n:P) RETURN id(n) AS i LIMIT 2");
    assert_eq!(rs.rows, vec![vec![Value::Int(0)], vec![Value::Int(1)]]);
    assert!(matches!(try_run(&mut g, "RETURN 1 + [2]"), Err(QueryError::TypeMismatch(_))));
}

#[test]
fn parameters() {
    let mut g = two_people();
    let params: Params = [("who".to_string(), text("Bob"))].into();
    let rs = query::run(&mut g, "MATCH (n:Person {name: $who}) RETURN id(n) AS id", &params, &ExecContext::default()).unwrap();
    assert_eq!(rs.rows, vec![vec![Value::Int(1)]]);
    assert!(matches!(try_run(&mut g, "RETURN $missing"), Err(QueryError::MissingParameter(_))));
}

#[test]
fn index_creation_and_use() {
    let mut g = PropertyGraph::directed();
    for i in 0..50 {
        run(&mut g, &format!("CREATE (:Entity {{name: 'e{i}', n: {i}}})"));
    }
    run(&mut g, CORPUS[30]);
    assert!(g.has_index("Entity", "name"));
    assert!(matches!(try_run(&mut g, CORPUS[30]), Err(QueryError::Graph(_))));
    let rs = run(&mut g, "MATCH (e:Entity {name: 'e42'}) RETURN e.n");
    assert_eq!(rs.rows, vec![vec![Value::Int(42)]]);
}

#[test]
fn error_offsets() {
    let err = query::parse("MATCH RETURN").unwrap_err();
    assert_eq!(err.offset(), Some(6));
    assert!(err.is_static());
    assert_eq!(query::parse("'unterminated").unwrap_err().offset(), Some(0));
    let err = query::parse("MATCH (n) RETURN m").unwrap_err();
    assert_eq!(err, QueryError::UnboundVariable { name: "m".into(), offset: 17 });
}

#[test]
fn rowset_json() {
    let mut g = two_people();
    let rs = run(&mut g, "MATCH (n:Person) RETURN n.name AS name, n");
    let v = rs.to_json();
    assert_eq!(v["columns"], serde_json::json!(["name", "n"]));
    assert_eq!(v["rows"][0][0], "Alice");
    assert_eq!(v["rows"][1][1]["labels"], serde_json::json!(["Person"]));
    assert_eq!(v["summary"]["nodes_created"], 0);
}

mod props_based {
    use super::*;
    use grafion_core::query::ast::*;
    use proptest::prelude::*;

    fn ident() -> impl Strategy<Value = String> {
        prop_oneof![
            "[a-z][a-z0-9_]{0,5}",
            Just("order".to_string()),
            Just("two words".to_string()),
        ]
        .prop_filter("not a keyword", |s| !grafion_core::query::lexer::is_keyword(s) || s == "order")
    }

    fn literal() -> impl Strategy<Value = Expr> {
        prop_oneof![
            Just(Literal::Null),
            any::<bool>().prop_map(Literal::Bool),
            any::<i64>().prop_map(Literal::Int),
            (-1e12f64..1e12).prop_map(Literal::Float),
            any::<f64>().prop_filter("finite", |f| f.is_finite()).prop_map(Literal::Float),
            ".{0,6}".prop_map(Literal::Text),
        ]
        .prop_map(Expr::Literal)
    }

    const VARS: [&str; 3] = ["a", "b", "r"];

    fn node(bound: bool) -> impl Strategy<Value = NodePattern> {
        let var = if bound { prop::option::of(prop::sample::select(&VARS[..2])).boxed() } else { Just(None).boxed() };
        (var, prop::collection::vec("[A-Z][a-z]{0,3}", 0..2)).prop_map(|(v, labels)| NodePattern {
            variable: v.map(str::to_string),
            labels,
            properties: Vec::new(),
        })
    }

    fn predicate() -> impl Strategy<Value = Expr> {
        (node(true), prop::sample::select(&[RelDirection::Outgoing, RelDirection::Incoming, RelDirection::Either][..]), proptest::option::of("[A-Z]{1,3}"), node(true))
            .prop_map(|(start, direction, rel_type, end)| {
                let rel = RelPattern { variable: None, rel_type, properties: Vec::new(), direction, var_length: false };
                Expr::PatternPredicate(Box::new(Pattern { path_variable: None, shortest: false, start, steps: vec![(rel, end)] }))
            })
    }

    fn expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            literal(),
            prop::sample::select(&VARS[..]).prop_map(|v| Expr::Variable(v.to_string())),
            "[a-z]{1,4}".prop_map(Expr::Parameter),
            predicate(),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            const OPS: &[BinaryOp] = &[
                BinaryOp::Or, BinaryOp::Xor, BinaryOp::And, BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                BinaryOp::Gt, BinaryOp::Le, BinaryOp::Ge, BinaryOp::In, BinaryOp::Add,
            ];
            prop_oneof![
                (prop::sample::select(OPS), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
                inner.clone().prop_map(|e| Expr::Not(Box::new(e))),
                (inner.clone(), any::<bool>()).prop_map(|(e, negated)| Expr::IsNull { expr: Box::new(e), negated }),
                (inner.clone(), ident()).prop_map(|(e, k)| Expr::Property(Box::new(e), k)),
                prop::collection::vec(inner.clone(), 0..3).prop_map(Expr::List),
                prop::collection::vec((ident(), inner.clone()), 0..3).prop_map(Expr::Map),
                (prop::sample::select(&["toInteger", "toFloat", "toString", "id", "gds.util.asNode"][..]), inner.clone())
                    .prop_map(|(n, a)| Expr::Function { name: n.to_string(), distinct: false, args: vec![a] }),
            ]
        })
    }

    fn statement() -> impl Strategy<Value = Statement> {
        let dir = prop::sample::select(&[RelDirection::Outgoing, RelDirection::Incoming, RelDirection::Either][..]);
        let rel_type = proptest::option::of("[A-Z]{1,3}");
        let items = prop::collection::vec(
            (expr(), proptest::option::of(ident()), any::<bool>()),
            1..4,
        );
        (dir, rel_type, expr(), items, any::<bool>(), proptest::option::of(0u64..100), any::<bool>()).prop_map(
            |(direction, rel_type, cond, items, distinct, limit, agg)| {
                let pattern = Pattern {
                    path_variable: None,
                    shortest: false,
                    start: NodePattern { variable: Some("a".into()), labels: vec!["Person".into()], properties: vec![("name".into(), Expr::Literal(Literal::Text("Alice".into())))] },
                    steps: vec![(
                        RelPattern { variable: Some("r".into()), rel_type, properties: Vec::new(), direction, var_length: false },
                        NodePattern { variable: Some("b".into()), labels: Vec::new(), properties: Vec::new() },
                    )],
                };
                let mut items: Vec<ReturnItem> = items
                    .into_iter()
                    .map(|(e, alias, wrap)| {
                        let expr = if agg && wrap { Expr::Function { name: "collect".into(), distinct: true, args: vec![e] } } else { e };
                        ReturnItem { expr, alias }
                    })
                    .collect();
                if agg {
                    items.push(ReturnItem { expr: Expr::CountStar, alias: Some("n".into()) });
                }
                let order = vec![SortItem { expr: Expr::Variable("a".into()), descending: distinct }];
                Statement {
                    clauses: vec![
                        Clause::Match(vec![pattern]),
                        Clause::Where(cond),
                        Clause::Return(Projection { distinct, items, order, limit }),
                    ],
                }
            },
        )
    }

    fn random_graph() -> impl Strategy<Value = PropertyGraph> {
        (1usize..7, prop::collection::vec((0usize..7, 0usize..7, prop::sample::select(&["FRIENDS", "COLLEAGUES", "KNOWS"][..])), 0..14), any::<bool>())
            .prop_map(|(n, edges, directed)| {
                let mut g = if directed { PropertyGraph::directed() } else { PropertyGraph::undirected() };
                for i in 0..n {
                    g.add_node(["Person"], props([("name", PropertyValue::text(["Alice", "Bob", "Cy"][i % 3])), ("age", PropertyValue::Int(20 + 5 * i as i64))]));
                }
                for (s, t, ty) in edges {
                    if s < n && t < n {
                        g.add_edge(s as u64, t as u64, ty, props([("w", (s + t) as i64)])).unwrap();
                    }
                }
                g
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn print_parse_round_trip(stmt in statement()) {
            let printed = stmt.to_string();
            let parsed = query::parse(&printed);
            prop_assert!(parsed.is_ok(), "{printed}: {:?}", parsed);
            prop_assert_eq!(parsed.unwrap(), stmt, "{}", printed);
        }

        #[test]
        fn read_only_statements_keep_the_store(mut g in random_graph(), pick in 0usize..8) {
            let queries = [
                CORPUS[19], CORPUS[20], CORPUS[21], CORPUS[22], CORPUS[24], CORPUS[26],
                "MATCH (a)-[r]-(b) WHERE a.age > 25 RETURN a.name AS n, count(*) AS c ORDER BY c DESC, n",
                "CALL gds.wcc.stream('g') YIELD nodeId, componentId RETURN componentId, collect(nodeId) AS members",
            ];
            let before = g.fingerprint();
            let snapshot = g.clone();
            let _ = query::run(&mut g, queries[pick], &Params::new(), &ExecContext::default());
            prop_assert_eq!(g.fingerprint(), before);
            prop_assert_eq!(g, snapshot);
        }

        #[test]
        fn create_counters_equal_store_delta(mut g in random_graph(), k in 1usize..4, typed in any::<bool>()) {
            let (n0, e0) = (g.node_count(), g.edge_count());
            let q = if typed {
                format!("MATCH (a:Person), (b:Person) WHERE id(a) < {k} AND id(b) < {k} CREATE (a)-[:FRIENDS {{x: 1}}]->(b)")
            } else {
                format!("UNWIND {:?} AS i CREATE (:New {{i: i}})-[:R]->(:New)", (0..k).collect::<Vec<_>>())
            };
            let rs = query::run(&mut g, &q, &Params::new(), &ExecContext::default()).unwrap();
            prop_assert_eq!(rs.summary.nodes_created as usize, g.node_count() - n0);
            prop_assert_eq!(rs.summary.relationships_created as usize, g.edge_count() - e0);
            let found = query::run(&mut g, "MATCH (a)-[r]->(b) RETURN count(*) AS c", &Params::new(), &ExecContext::default()).unwrap();
            let Value::Int(c) = found.rows[0][0] else { panic!() };
            prop_assert!(c as usize >= rs.summary.relationships_created as usize);
        }

        #[test]
        fn pattern_predicate_equals_brute_force(mut g in random_graph(), negate in any::<bool>()) {
            let q = format!(
                "MATCH (a)-[r:FRIENDS]-(b) WHERE {}(a)-[:COLLEAGUES]-(b) RETURN id(a), id(b), id(r)",
                if negate { "NOT " } else { "" }
            );
            let rs = query::run(&mut g, &q, &Params::new(), &ExecContext::default()).unwrap();
            let mut got: Vec<Vec<Value>> = rs.rows;
            got.sort_by_key(|r| format!("{r:?}"));
            let linked = |x: u64, y: u64| g.edges().any(|e| e.rel_type == "COLLEAGUES" && ((e.source == x && e.target == y) || (e.source == y && e.target == x)));
            let mut expected = Vec::new();
            for e in g.edges().filter(|e| e.rel_type == "FRIENDS") {
                let mut ends = vec![(e.source, e.target)];
                if e.source != e.target {
                    ends.push((e.target, e.source));
                }
                for (x, y) in ends {
                    if linked(x, y) != negate {
                        expected.push(vec![Value::Int(x as i64), Value::Int(y as i64), Value::Int(e.id as i64)]);
                    }
                }
            }
            expected.sort_by_key(|r| format!("{r:?}"));
            prop_assert_eq!(got, expected);
        }
    }
}

//! Query listings used as parser and executor fixtures, verbatim.

pub const CORPUS: &[&str] = &[
    "CREATE (a:Person {name: 'Alice'})\nCREATE (b:Person {name: 'Bob'})",
    "MATCH (a:Person {name: 'Alice'}), (b:Person {name: 'Bob'})\nCREATE (a)-[:FRIEND]->(b)",
    "CREATE (a:Person {name: 'Alice', age: 30, city: 'New York'})",
    "MATCH (a:Person {name: 'Alice'}), (b:Person {name: 'Bob'})\nCREATE (a)-[:FRIEND {since: 2015, closeness: 4}]->(b)\n",
    "LOAD CSV WITH HEADERS FROM 'file:///people.csv' AS row\nCREATE (p:Person {name: row.name, age: toInteger(row.age), city: row.city})",
    "CALL apoc.export.csv.all('exported_graph.csv', {useTypes: true, delimiter: ';'})",
    "CREATE (a:Person {name: 'Alice'})",
    "CREATE (b:Person {name: 'Bob'})",
    "MATCH (n:Person) RETURN n",
    "MATCH (n:Person) RETURN n.name AS name",
    "\n        MATCH (a:Person {name: 'Alice'}), (b:Person {name: 'Bob'})\n        CREATE (a)-[:FRIEND]->(b)\n    ",
    "MATCH (start:Location {name: \"A\"}), (end:Location {name: \"B\"})\nCALL gds.shortestPath.dijkstra.stream({\n  sourceNode: start,\n  targetNode: end,\n  relationshipWeightProperty: 'distance'\n})\nYIELD nodeId, cost\nRETURN gds.util.asNode(nodeId).name AS node, cost",
    "CREATE (n1:Node {name: 'Warehouse'})\nCREATE (n2:Node {name: 'Distribution Center'})\nCREATE (n1)-[:CONNECTS {distance: 50}]->(n2)",
    "MATCH (start:Node {name: 'A'}), (end:Node {name: 'B'})\nMATCH path = shortestPath((start)-[*]-(end))\nRETURN path;",
    "MATCH (n1:Node {name: 'A'})-[r:CONNECTS]->(n2:Node {name: 'B'})\nDELETE r;",
    "CALL gds.wcc.stream({\n  nodeProjection: 'Node',\n  relationshipProjection: 'CONNECTS'\n})\nYIELD componentId, nodeId\nRETURN componentId, gds.util.asNode(nodeId).name AS nodeName",
    "// Adding a node with properties\nCREATE (a:Person {name: 'Alice', age: 30})\n// Adding an edge (relationship) between nodes\nMATCH (a:Person {name: 'Alice'}), (b:Person {name: 'Bob'})\nCREATE (a)-[:KNOWS]->(b)",
    "// Remove a node and all its relationships\nMATCH (n:Person {name: 'Alice'})\nDETACH DELETE n",
    "// Modify a node property\nMATCH (a:Person {name: 'Alice'})\nSET a.age = 31\n\n// Modify an edge property\nMATCH (a)-[r:KNOWS]->(b)\nSET r.since = 2021",
    "MATCH (n:Person)-[r:KNOWS]-(m:Person)\nWHERE n.age > 30\nRETURN n, r, m",
    "MATCH (a:Person)-[:KNOWS]-(b:Person)\nWITH collect(DISTINCT a) + collect(DISTINCT b) AS nodes\nUNWIND nodes AS n\nRETURN n",
    "MATCH (a)-[r:FRIENDS]-(b)\nWHERE (a)-[:COLLEAGUES]-(b)\nRETURN a, b, r",
    "MATCH (a)-[r:KNOWS]-(b)\nWHERE NOT (a)-[:COLLEAGUES]-(b)\nRETURN a, r, b",
    "MATCH (p:Person)-[:FRIENDS_WITH]->(f:Person)\nRETURN p, f",
    "MATCH (p:Person)-[:FRIENDS_WITH]-(f)\nRETURN p.name AS Name, COUNT(f) AS DegreeCentrality\nORDER BY DegreeCentrality DESC",
    "CALL gds.pageRank.stream('myGraph')\nYIELD nodeId, score\nRETURN gds.util.asNode(nodeId).name AS Name, score\nORDER BY score DESC",
    "CALL gds.louvain.stream('myGraph')\nYIELD nodeId, communityId\nRETURN gds.util.asNode(nodeId).name AS Name, communityId\nORDER BY communityId",
    "    MATCH (u:User)-[r:RATED]->(m:Movie)\n    WITH u, collect(m) AS movies\n    MATCH (u2:User)-[r:RATED]->(m2:Movie)\n    WHERE u <> u2 AND m2 IN movies\n    RETURN u2.name AS SimilarUser, count(*) AS SharedInterests\n    ORDER BY SharedInterests DESC\n    LIMIT 5",
    "MATCH (a:Account)-[t:TRANSFER]->(b:Account)\nWHERE t.amount > 10000 AND a.region <> b.region\nRETURN a, b, t.amount",
    "MATCH (p:Person)-[:FRIEND]->(f:Person)\nWHERE p.age > 30\nRETURN f.name",
    "CREATE INDEX FOR (n:Entity) ON (n.name)",
    "CREATE (u:User {id: 1, name: \"Alice\"})\nCREATE (p:Product {id: 101, name: \"Product A\"})\nCREATE (u)-[:PURCHASED]->(p)",
];

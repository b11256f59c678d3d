//! Mesh file parsers: the native line-oriented format and Gmsh v2 ASCII
//! restricted to 2D triangles.
//!
//! Native format ('#' starts a comment, indices 0-based):
//! ```text
//! $nodes <count>        then: <id> <x> <y>
//! $elements <count>     then: <id> <v1> <v2> <v3>
//! $boundary <count>     then: <v1> <v2> <tag>   # tag in {wall, dirichlet, outflow}
//! ```

use super::BoundaryTag;
use crate::{Error, Result};

type Topology = (Vec<f64>, Vec<f64>, Vec<[usize; 3]>, Vec<(usize, usize, BoundaryTag)>);

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::MeshParse { line: line + 1, msg: msg.into() }
}

pub fn parse_native(text: &str) -> Result<Topology> {
    let mut vx = vec![];
    let mut vy = vec![];
    let mut elements = vec![];
    let mut boundary = vec![];

    enum Section {
        None,
        Nodes(usize),
        Elements(usize),
        Boundary(usize),
    }
    let mut section = Section::None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let first = tok.next().unwrap();
        if let Some(name) = first.strip_prefix('$') {
            let count: usize = tok
                .next()
                .ok_or_else(|| parse_err(lineno, "missing count after section header"))?
                .parse()
                .map_err(|_| parse_err(lineno, "bad count"))?;
            section = match name {
                "nodes" => Section::Nodes(count),
                "elements" => Section::Elements(count),
                "boundary" => Section::Boundary(count),
                other => return Err(parse_err(lineno, format!("unknown section '${other}'"))),
            };
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::None => return Err(parse_err(lineno, "data before any section header")),
            Section::Nodes(n) => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "node line needs: id x y"));
                }
                let id: usize =
                    fields[0].parse().map_err(|_| parse_err(lineno, "bad node id"))?;
                if id != vx.len() {
                    return Err(parse_err(lineno, format!("node id {id} out of order")));
                }
                if vx.len() >= n {
                    return Err(parse_err(lineno, "more nodes than declared"));
                }
                vx.push(fields[1].parse().map_err(|_| parse_err(lineno, "bad x"))?);
                vy.push(fields[2].parse().map_err(|_| parse_err(lineno, "bad y"))?);
            }
            Section::Elements(n) => {
                if fields.len() != 4 {
                    return Err(parse_err(lineno, "element line needs: id v1 v2 v3"));
                }
                if elements.len() >= n {
                    return Err(parse_err(lineno, "more elements than declared"));
                }
                let mut v = [0usize; 3];
                for (i, f) in fields[1..].iter().enumerate() {
                    v[i] = f
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad vertex index '{f}'")))?;
                    if v[i] >= vx.len() {
                        return Err(parse_err(
                            lineno,
                            format!("vertex index {} beyond node count {}", v[i], vx.len()),
                        ));
                    }
                }
                if v[0] == v[1] || v[1] == v[2] || v[0] == v[2] {
                    return Err(parse_err(lineno, "element repeats a vertex index"));
                }
                elements.push(v);
            }
            Section::Boundary(n) => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "boundary line needs: v1 v2 tag"));
                }
                if boundary.len() >= n {
                    return Err(parse_err(lineno, "more boundary faces than declared"));
                }
                let a: usize = fields[0].parse().map_err(|_| parse_err(lineno, "bad index"))?;
                let b: usize = fields[1].parse().map_err(|_| parse_err(lineno, "bad index"))?;
                let tag: BoundaryTag =
                    fields[2].parse().map_err(|_| parse_err(lineno, "bad boundary tag"))?;
                boundary.push((a, b, tag));
            }
        }
    }
    if elements.is_empty() {
        return Err(Error::mesh("mesh has no elements"));
    }
    Ok((vx, vy, elements, boundary))
}

/// Gmsh v2.2 ASCII, triangles only. Line elements (type 1) carry boundary
/// tags through their physical group names.
pub fn parse_gmsh(text: &str) -> Result<Topology> {
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0usize;
    let mut phys_names: std::collections::HashMap<usize, BoundaryTag> = Default::default();
    let mut vx = vec![];
    let mut vy = vec![];
    let mut id_map: std::collections::HashMap<usize, usize> = Default::default();
    let mut elements: Vec<[usize; 3]> = vec![];
    let mut boundary = vec![];

    while i < lines.len() {
        let line = lines[i].trim();
        match line {
            "$PhysicalNames" => {
                let count: usize = lines[i + 1]
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(i + 1, "bad PhysicalNames count"))?;
                for j in 0..count {
                    let l = lines[i + 2 + j].trim();
                    let parts: Vec<&str> = l.split_whitespace().collect();
                    if parts.len() < 3 {
                        return Err(parse_err(i + 2 + j, "bad physical name line"));
                    }
                    let id: usize =
                        parts[1].parse().map_err(|_| parse_err(i + 2 + j, "bad id"))?;
                    let name = parts[2].trim_matches('"');
                    if let Ok(tag) = name.parse::<BoundaryTag>() {
                        phys_names.insert(id, tag);
                    }
                }
                i += 2 + count;
            }
            "$Nodes" => {
                let count: usize = lines[i + 1]
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(i + 1, "bad Nodes count"))?;
                for j in 0..count {
                    let parts: Vec<&str> = lines[i + 2 + j].split_whitespace().collect();
                    if parts.len() < 4 {
                        return Err(parse_err(i + 2 + j, "bad node line"));
                    }
                    let id: usize = parts[0].parse().map_err(|_| parse_err(i + 2 + j, "bad id"))?;
                    id_map.insert(id, vx.len());
                    vx.push(parts[1].parse().map_err(|_| parse_err(i + 2 + j, "bad x"))?);
                    vy.push(parts[2].parse().map_err(|_| parse_err(i + 2 + j, "bad y"))?);
                }
                i += 2 + count;
            }
            "$Elements" => {
                let count: usize = lines[i + 1]
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(i + 1, "bad Elements count"))?;
                for j in 0..count {
                    let lineno = i + 2 + j;
                    let parts: Vec<usize> = lines[lineno]
                        .split_whitespace()
                        .map(|t| t.parse::<usize>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| parse_err(lineno, "bad element line"))?;
                    if parts.len() < 3 {
                        return Err(parse_err(lineno, "bad element line"));
                    }
                    let etype = parts[1];
                    let ntags = parts[2];
                    let conn = &parts[3 + ntags..];
                    let map = |id: usize| -> Result<usize> {
                        id_map
                            .get(&id)
                            .copied()
                            .ok_or_else(|| parse_err(lineno, format!("unknown node id {id}")))
                    };
                    match etype {
                        1 => {
                            // boundary segment; first tag is the physical group
                            if conn.len() != 2 {
                                return Err(parse_err(lineno, "line element needs 2 nodes"));
                            }
                            let tag = parts
                                .get(3)
                                .and_then(|p| phys_names.get(p))
                                .copied()
                                .unwrap_or(BoundaryTag::Wall);
                            boundary.push((map(conn[0])?, map(conn[1])?, tag));
                        }
                        2 => {
                            if conn.len() != 3 {
                                return Err(parse_err(lineno, "triangle needs 3 nodes"));
                            }
                            elements.push([map(conn[0])?, map(conn[1])?, map(conn[2])?]);
                        }
                        15 => {} // points: ignored
                        other => {
                            return Err(parse_err(
                                lineno,
                                format!("unsupported gmsh element type {other} (2D triangles only)"),
                            ))
                        }
                    }
                }
                i += 2 + count;
            }
            _ => i += 1,
        }
    }
    if elements.is_empty() {
        return Err(Error::mesh("gmsh file contains no triangles"));
    }
    Ok((vx, vy, elements, boundary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::MeshData;

    const TWO_TRI: &str = "\
# two-triangle unit square
$nodes 4
0 0.0 0.0
1 1.0 0.0
2 1.0 1.0
3 0.0 1.0
$elements 2
0 0 1 2
1 0 2 3
$boundary 4
0 1 wall
1 2 outflow
2 3 wall
3 0 dirichlet
";

    #[test]
    fn native_roundtrip() {
        let m = MeshData::from_text(TWO_TRI).unwrap();
        assert_eq!(m.k(), 2);
        assert_eq!(m.nvertices(), 4);
        let mut tags: Vec<BoundaryTag> = (0..2)
            .flat_map(|k| (0..3).map(move |f| (k, f)))
            .filter_map(|(k, f)| m.face_tag[k][f])
            .collect();
        tags.sort_by_key(|t| format!("{t:?}"));
        assert_eq!(tags.len(), 4);
        assert!(tags.contains(&BoundaryTag::Outflow));
        assert!(tags.contains(&BoundaryTag::Dirichlet));
    }

    #[test]
    fn out_of_range_vertex_names_line() {
        let bad = "$nodes 3\n0 0 0\n1 1 0\n2 0 1\n$elements 1\n0 0 1 7\n";
        let err = MeshData::from_text(bad).unwrap_err();
        match err {
            Error::MeshParse { line, .. } => assert_eq!(line, 6),
            other => panic!("wrong error {other}"),
        }
    }

    #[test]
    fn repeated_vertex_in_element_rejected() {
        let bad = "$nodes 3\n0 0 0\n1 1 0\n2 0 1\n$elements 1\n0 0 1 1\n";
        assert!(MeshData::from_text(bad).is_err());
    }

    #[test]
    fn gmsh_import() {
        let gmsh = "\
$MeshFormat
2.2 0 8
$EndMeshFormat
$PhysicalNames
2
1 10 \"wall\"
1 11 \"outflow\"
$EndPhysicalNames
$Nodes
4
1 0 0 0
2 1 0 0
3 1 1 0
4 0 1 0
$EndNodes
$Elements
6
1 1 2 10 1 1 2
2 1 2 10 2 2 3
3 1 2 11 3 3 4
4 1 2 10 4 4 1
5 2 2 1 1 1 2 3
6 2 2 1 1 1 3 4
$EndElements
";
        let m = MeshData::from_text(gmsh).unwrap();
        assert_eq!(m.k(), 2);
        let outflows: usize = (0..2)
            .flat_map(|k| (0..3).map(move |f| (k, f)))
            .filter(|&(k, f)| m.face_tag[k][f] == Some(BoundaryTag::Outflow))
            .count();
        assert_eq!(outflows, 1);
    }
}

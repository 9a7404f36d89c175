use super::{NodeKind, PreparedNetwork};
use crate::error::Result;
use crate::format::table_list;
use crate::model::Scope;

/// The intermediate form: every clause followed by its joint table at six
/// decimals. Rules list the joint over head and body, observations the
/// joint over their variables.
pub fn render_intermediate(net: &PreparedNetwork) -> Result<String> {
    let mut out = String::new();
    let cliques: Vec<String> = net
        .nodes
        .iter()
        .filter(|n| n.kind == NodeKind::Clique)
        .map(|n| format!("{} : {}", names(n.scope()), table_list(&n.table)))
        .collect();
    if !cliques.is_empty() {
        out.push_str(&format!("?- {}.\n", cliques.join("; ")));
    }
    for n in &net.nodes {
        if let NodeKind::Rule { head, body, .. } = &n.kind {
            out.push_str(&format!(
                "{} -> {body} : {}.\n",
                names(head),
                table_list(&n.table)
            ));
        }
    }
    for o in &net.observations {
        let scope = Scope::new(o.vars.clone())?;
        let joint = net.joint_over(&scope)?;
        out.push_str(&format!("{} : {}.\n", names(&scope), table_list(&joint)));
    }
    Ok(out)
}

fn names(scope: &Scope) -> String {
    let v: Vec<&str> = scope.vars().iter().map(|v| v.as_str()).collect();
    v.join(", ")
}

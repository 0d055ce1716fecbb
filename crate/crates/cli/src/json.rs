//! JSON form of the syntax tree: one object per node, tagged by `"node"`, with integers
//! written as decimal strings.

use bitbranch_core::lang::{BinOp, Block, Expr, Ident, Origin, Program, Stmt, StmtKind, UnOp};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed AST JSON at {path}: {msg}")]
pub struct JsonError {
    pub path: String,
    pub msg: String,
}

pub fn expr_to_json(e: &Expr) -> Value {
    match e {
        Expr::Lit(n) => json!({"node": "Lit", "value": n.to_string()}),
        Expr::BoolLit(b) => json!({"node": "BoolLit", "value": b}),
        Expr::Var(x) => json!({"node": "Var", "name": x.as_str()}),
        Expr::Width => json!({"node": "Width"}),
        Expr::Unary(op, a) => json!({"node": "Unary", "op": op.name(), "arg": expr_to_json(a)}),
        Expr::Binary(op, a, b) => {
            json!({"node": "Binary", "op": op.name(), "lhs": expr_to_json(a), "rhs": expr_to_json(b)})
        }
        Expr::Ite(c, t, f) => json!({
            "node": "Ite", "cond": expr_to_json(c), "then": expr_to_json(t), "else": expr_to_json(f)
        }),
        Expr::Opaque(a) => json!({"node": "Opaque", "arg": expr_to_json(a)}),
    }
}

fn block_to_json(b: &Block) -> Value {
    Value::Array(b.iter().map(stmt_to_json).collect())
}

pub fn stmt_to_json(s: &Stmt) -> Value {
    let mut v = match &s.kind {
        StmtKind::Assign(x, e) => {
            json!({"node": "Assign", "lhs": x.as_str(), "rhs": expr_to_json(e)})
        }
        StmtKind::Havoc(x) => json!({"node": "Havoc", "var": x.as_str()}),
        StmtKind::Assume(c) => json!({"node": "Assume", "cond": expr_to_json(c)}),
        StmtKind::Error => json!({"node": "Error"}),
        StmtKind::IfCond(c, t, e) => json!({
            "node": "IfCond", "cond": expr_to_json(c), "then": block_to_json(t), "else": block_to_json(e)
        }),
        StmtKind::IfNondet(t, e) => {
            json!({"node": "IfNondet", "then": block_to_json(t), "else": block_to_json(e)})
        }
        StmtKind::While(c, b) => {
            json!({"node": "While", "cond": expr_to_json(c), "body": block_to_json(b)})
        }
    };
    v["origin"] = match s.origin {
        Some(o) => json!({"tag": o.tag.to_string(), "aux": o.aux}),
        None => Value::Null,
    };
    v
}

pub fn program_to_json(p: &Program) -> Value {
    json!({
        "node": "Program",
        "decls": p.decls.iter().map(Ident::as_str).collect::<Vec<_>>(),
        "body": block_to_json(&p.body),
    })
}

struct Reader {
    path: Vec<String>,
}

impl Reader {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, JsonError> {
        Err(JsonError {
            path: format!("${}", self.path.concat()),
            msg: msg.into(),
        })
    }

    fn nested<T>(
        &mut self,
        seg: String,
        f: impl FnOnce(&mut Self) -> Result<T, JsonError>,
    ) -> Result<T, JsonError> {
        self.path.push(seg);
        let r = f(self);
        self.path.pop();
        r
    }

    fn object<'v>(&self, v: &'v Value) -> Result<&'v Map<String, Value>, JsonError> {
        v.as_object()
            .map_or_else(|| self.err("expected an object"), Ok)
    }

    fn field<'v>(&self, o: &'v Map<String, Value>, k: &str) -> Result<&'v Value, JsonError> {
        o.get(k)
            .map_or_else(|| self.err(format!("missing field `{k}`")), Ok)
    }

    fn str<'v>(&self, o: &'v Map<String, Value>, k: &str) -> Result<&'v str, JsonError> {
        self.field(o, k)?
            .as_str()
            .map_or_else(|| self.err(format!("`{k}` must be a string")), Ok)
    }

    fn ident(&self, s: &str) -> Result<Ident, JsonError> {
        Ident::new(s).or_else(|e| self.err(e.to_string()))
    }

    fn node<'v>(&self, v: &'v Value) -> Result<(&'v Map<String, Value>, &'v str), JsonError> {
        let o = self.object(v)?;
        Ok((o, self.str(o, "node")?))
    }

    fn expr(&mut self, v: &Value) -> Result<Expr, JsonError> {
        let (o, tag) = self.node(v)?;
        let sub = |r: &mut Self, k: &str| {
            let child = r.field(o, k)?;
            r.nested(format!(".{k}"), |r| r.expr(child))
        };
        Ok(match tag {
            "Lit" => {
                let s = self.str(o, "value")?;
                Expr::Lit(
                    s.parse()
                        .or_else(|_| self.err(format!("`{s}` is not an integer")))?,
                )
            }
            "BoolLit" => Expr::BoolLit(
                self.field(o, "value")?
                    .as_bool()
                    .map_or_else(|| self.err("`value` must be a boolean"), Ok)?,
            ),
            "Var" => Expr::Var(self.ident(self.str(o, "name")?)?),
            "Width" => Expr::Width,
            "Unary" => {
                let name = self.str(o, "op")?;
                let op = UnOp::from_name(name)
                    .map_or_else(|| self.err(format!("unknown unary `{name}`")), Ok)?;
                Expr::unary(op, sub(self, "arg")?)
            }
            "Binary" => {
                let name = self.str(o, "op")?;
                let op = BinOp::from_name(name)
                    .map_or_else(|| self.err(format!("unknown binary `{name}`")), Ok)?;
                Expr::binary(op, sub(self, "lhs")?, sub(self, "rhs")?)
            }
            "Ite" => Expr::ite(sub(self, "cond")?, sub(self, "then")?, sub(self, "else")?),
            "Opaque" => Expr::opaque(sub(self, "arg")?),
            other => return self.err(format!("unknown expression node `{other}`")),
        })
    }

    fn block(&mut self, o: &Map<String, Value>, k: &str) -> Result<Block, JsonError> {
        let arr = self.field(o, k)?;
        let Some(items) = arr.as_array() else {
            return self.err(format!("`{k}` must be an array"));
        };
        items
            .iter()
            .enumerate()
            .map(|(i, s)| self.nested(format!(".{k}[{i}]"), |r| r.stmt(s)))
            .collect()
    }

    fn origin(&self, o: &Map<String, Value>) -> Result<Option<Origin>, JsonError> {
        match o.get("origin") {
            None | Some(Value::Null) => Ok(None),
            Some(v) => {
                let m = self.object(v)?;
                let tag = self.str(m, "tag")?;
                let tag = tag
                    .parse()
                    .or_else(|_| self.err(format!("bad origin tag `{tag}`")))?;
                let aux = m.get("aux").and_then(Value::as_bool).unwrap_or(false);
                Ok(Some(Origin { tag, aux }))
            }
        }
    }

    fn stmt(&mut self, v: &Value) -> Result<Stmt, JsonError> {
        let (o, tag) = self.node(v)?;
        let sub = |r: &mut Self, k: &str| {
            let child = r.field(o, k)?;
            r.nested(format!(".{k}"), |r| r.expr(child))
        };
        let kind = match tag {
            "Assign" => StmtKind::Assign(self.ident(self.str(o, "lhs")?)?, sub(self, "rhs")?),
            "Havoc" => StmtKind::Havoc(self.ident(self.str(o, "var")?)?),
            "Assume" => StmtKind::Assume(sub(self, "cond")?),
            "Error" => StmtKind::Error,
            "IfCond" => StmtKind::IfCond(
                sub(self, "cond")?,
                self.block(o, "then")?,
                self.block(o, "else")?,
            ),
            "IfNondet" => StmtKind::IfNondet(self.block(o, "then")?, self.block(o, "else")?),
            "While" => StmtKind::While(sub(self, "cond")?, self.block(o, "body")?),
            other => return self.err(format!("unknown statement node `{other}`")),
        };
        Ok(Stmt::with_origin(kind, self.origin(o)?))
    }

    fn program(&mut self, v: &Value) -> Result<Program, JsonError> {
        let (o, tag) = self.node(v)?;
        if tag != "Program" {
            return self.err(format!("expected a Program node, found `{tag}`"));
        }
        let Some(decls) = self.field(o, "decls")?.as_array() else {
            return self.err("`decls` must be an array");
        };
        let decls = decls
            .iter()
            .map(|d| {
                d.as_str().map_or_else(
                    || self.err("declarations must be strings"),
                    |s| self.ident(s),
                )
            })
            .collect::<Result<_, _>>()?;
        Ok(Program {
            decls,
            body: self.block(o, "body")?,
        })
    }
}

pub fn expr_from_json(v: &Value) -> Result<Expr, JsonError> {
    Reader { path: Vec::new() }.expr(v)
}

/// Decodes a program. Scoping is not checked here.
pub fn program_from_json(v: &Value) -> Result<Program, JsonError> {
    Reader { path: Vec::new() }.program(v)
}

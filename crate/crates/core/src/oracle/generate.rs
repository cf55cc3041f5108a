use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::Machine;
use crate::parser::parse_machine;

/// Shape of a random abstract/concrete machine pair.
///
/// Variables are `v0..` over `0..domain_size-1`. When there are skip events
/// the concrete machine adds a counter `h : int 0..2` that they drive, so a
/// concrete space has at most `4^3 * 3 = 192` states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomMachineSpec {
    pub seed: u64,
    /// 1..=3
    pub n_vars: usize,
    /// 2..=4
    pub domain_size: i64,
    /// 1..=4
    pub n_abstract_events: usize,
    /// 1..=6, raised to `n_abstract_events` if smaller
    pub n_concrete_events: usize,
    /// 0..=2
    pub n_skip_events: usize,
    /// Favour skip cycles and events refined by several concrete events.
    pub biased: bool,
}

impl RandomMachineSpec {
    /// Draws every field from `seed`. About 30% of seeds are biased.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
        let n_abstract_events = rng.gen_range(1..=4);
        RandomMachineSpec {
            seed,
            n_vars: rng.gen_range(1..=3),
            domain_size: rng.gen_range(2..=4),
            n_abstract_events,
            n_concrete_events: rng.gen_range(1..=6),
            n_skip_events: rng.gen_range(0..=2),
            biased: rng.gen_bool(0.3),
        }
    }

    fn check(&self) {
        assert!((1..=3).contains(&self.n_vars), "n_vars out of range");
        assert!((2..=4).contains(&self.domain_size), "domain_size out of range");
        assert!((1..=4).contains(&self.n_abstract_events), "n_abstract_events out of range");
        assert!((1..=6).contains(&self.n_concrete_events), "n_concrete_events out of range");
        assert!(self.n_skip_events <= 2, "n_skip_events out of range");
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Operand {
    Var(usize),
    H,
    Param,
    Lit(i64),
}

#[derive(Debug, Clone, PartialEq)]
enum Atom {
    Cmp(Operand, &'static str, Operand),
    Not(Box<Atom>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Rhs {
    Lit(i64),
    Copy(Operand),
    Inc,
    Dec,
    Choice,
}

#[derive(Debug, Clone)]
struct Ev {
    name: String,
    param: bool,
    /// The abstract parameter is gone and fixed to this value by a witness.
    witness: Option<i64>,
    choice: bool,
    guard: Vec<Atom>,
    actions: Vec<(Operand, Rhs)>,
    refines: Option<String>,
}

struct Gen<'a> {
    spec: &'a RandomMachineSpec,
    rng: ChaCha8Rng,
}

impl Gen<'_> {
    fn var(&mut self) -> usize {
        self.rng.gen_range(0..self.spec.n_vars)
    }

    fn lit(&mut self) -> i64 {
        self.rng.gen_range(0..self.spec.domain_size)
    }

    fn atom(&mut self, with_param: bool) -> Atom {
        let d = self.spec.domain_size;
        let v = Operand::Var(self.var());
        match self.rng.gen_range(0..6) {
            0 => Atom::Cmp(v, "=", Operand::Lit(self.lit())),
            1 => Atom::Cmp(v, "/=", Operand::Lit(self.lit())),
            2 => Atom::Cmp(v, "<", Operand::Lit(self.rng.gen_range(1..d))),
            3 => Atom::Cmp(v, ">", Operand::Lit(self.rng.gen_range(0..d - 1))),
            4 if self.spec.n_vars > 1 => {
                let w = Operand::Var(self.var());
                Atom::Cmp(v, *["=", "<=", "/="].choose(&mut self.rng).unwrap(), w)
            }
            5 if with_param => Atom::Cmp(Operand::Param, "=", Operand::Lit(self.rng.gen_range(0..2))),
            _ => Atom::Cmp(v, "<=", Operand::Lit(self.lit())),
        }
    }

    fn rhs(&mut self, target: usize, ev_param: bool, ev_choice: bool) -> Rhs {
        loop {
            let r = match self.rng.gen_range(0..6) {
                0 => Rhs::Lit(self.lit()),
                1 => Rhs::Copy(Operand::Var(self.var())),
                2 => Rhs::Inc,
                3 => Rhs::Dec,
                4 if ev_param => Rhs::Copy(Operand::Param),
                5 if ev_choice => Rhs::Choice,
                _ => continue,
            };
            if r == Rhs::Copy(Operand::Var(target)) {
                continue;
            }
            return r;
        }
    }

    fn abstract_event(&mut self, j: usize) -> Ev {
        let param = self.rng.gen_bool(0.3);
        let choice = self.rng.gen_bool(0.1);
        let n_atoms = self.rng.gen_range(0..=2);
        let guard = (0..n_atoms).map(|_| self.atom(param)).collect();
        let mut targets: Vec<usize> = (0..self.spec.n_vars).collect();
        targets.shuffle(&mut self.rng);
        let n_actions = self.rng.gen_range(1..=targets.len().min(2));
        let mut actions: Vec<(Operand, Rhs)> = targets[..n_actions]
            .iter()
            .map(|&t| (Operand::Var(t), self.rhs(t, param, choice)))
            .collect();
        if choice && !actions.iter().any(|(_, r)| *r == Rhs::Choice) {
            actions[0].1 = Rhs::Choice;
        }
        Ev {
            name: format!("e{j}"),
            param,
            witness: None,
            choice,
            guard,
            actions,
            refines: None,
        }
    }

    fn mutate(&mut self, ev: &mut Ev) {
        match self.rng.gen_range(0..3) {
            0 => {
                let a = self.atom(ev.param);
                ev.guard.push(a);
            }
            1 if !ev.guard.is_empty() => {
                let i = self.rng.gen_range(0..ev.guard.len());
                ev.guard.remove(i);
            }
            _ => {
                let i = self.rng.gen_range(0..ev.actions.len());
                let Operand::Var(t) = ev.actions[i].0 else { return };
                ev.actions[i].1 = self.rhs(t, ev.param, ev.choice);
            }
        }
    }
}

fn operand(o: Operand, witness: Option<i64>) -> String {
    match o {
        Operand::Var(i) => format!("v{i}"),
        Operand::H => "h".into(),
        Operand::Param => witness.map_or("p".into(), |c| c.to_string()),
        Operand::Lit(n) => n.to_string(),
    }
}

fn atom_text(a: &Atom, witness: Option<i64>) -> String {
    match a {
        Atom::Cmp(l, op, r) => format!("{} {op} {}", operand(*l, witness), operand(*r, witness)),
        Atom::Not(inner) => format!("not ({})", atom_text(inner, witness)),
    }
}

fn render_event(out: &mut String, ev: &Ev, top: &dyn Fn(Operand) -> i64) {
    let w = ev.witness;
    write!(out, "  {}", ev.name).unwrap();
    if let Some(target) = &ev.refines {
        write!(out, " refines {target}").unwrap();
        if let Some(c) = w {
            write!(out, " with p := {c}").unwrap();
        }
    }
    out.push_str(" ==");
    if ev.param && w.is_none() {
        out.push_str(" any p : int 0..1");
    }
    if ev.choice {
        out.push_str(" choose q : int 0..1");
    }
    // Increments and decrements carry their own range guards.
    let mut guard: Vec<String> = ev.guard.iter().map(|a| atom_text(a, w)).collect();
    for (t, r) in &ev.actions {
        let name = operand(*t, w);
        match r {
            Rhs::Inc => guard.push(format!("{name} < {}", top(*t))),
            Rhs::Dec => guard.push(format!("{name} > 0")),
            _ => {}
        }
    }
    if !guard.is_empty() {
        write!(out, " when {}", guard.join(" /\\ ")).unwrap();
    }
    let actions: Vec<String> = ev
        .actions
        .iter()
        .map(|(t, r)| {
            let name = operand(*t, w);
            let value = match r {
                Rhs::Lit(n) => n.to_string(),
                Rhs::Copy(o) => operand(*o, w),
                Rhs::Inc => format!("{name} + 1"),
                Rhs::Dec => format!("{name} - 1"),
                Rhs::Choice => "q".into(),
            };
            format!("{name} := {value}")
        })
        .collect();
    writeln!(out, " then {} end", actions.join(" || ")).unwrap();
}

fn render(name: &str, refines: Option<&str>, spec: &RandomMachineSpec, init: &[i64], h: bool, events: &[Ev]) -> String {
    let mut out = String::new();
    write!(out, "machine {name}").unwrap();
    if let Some(a) = refines {
        write!(out, " refines {a}").unwrap();
    }
    out.push_str("\nvariables\n");
    for i in 0..spec.n_vars {
        writeln!(out, "  v{i} : int 0..{};", spec.domain_size - 1).unwrap();
    }
    if h {
        out.push_str("  h : int 0..2;\n");
    }
    out.push_str("init\n");
    for (i, v) in init.iter().enumerate() {
        writeln!(out, "  v{i} := {v};").unwrap();
    }
    if h {
        out.push_str("  h := 0;\n");
    }
    out.push_str("events\n");
    let d = spec.domain_size;
    let top = move |o: Operand| if o == Operand::H { 2 } else { d - 1 };
    for ev in events {
        render_event(&mut out, ev, &top);
    }
    out.push_str("end\n");
    out
}

/// Source text of a random pair, abstract machine `A` first.
pub fn generate_sources(spec: &RandomMachineSpec) -> (String, String) {
    spec.check();
    let mut g = Gen {
        spec,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
    };
    let init: Vec<i64> = (0..spec.n_vars).map(|_| g.lit()).collect();
    let abstract_events: Vec<Ev> = (0..spec.n_abstract_events).map(|j| g.abstract_event(j)).collect();

    // Some pairs are exact copies up to guard splitting, so that both
    // verdicts turn up regularly.
    let clean = g.rng.gen_bool(0.4);
    let h = spec.n_skip_events > 0;
    let gated = h && g.rng.gen_bool(0.5);

    let n_concrete = spec.n_concrete_events.max(spec.n_abstract_events);
    let mut family = vec![1usize; spec.n_abstract_events];
    for _ in spec.n_abstract_events..n_concrete {
        let split_bias = if spec.biased { 0.9 } else { 0.5 };
        if g.rng.gen_bool(split_bias) {
            let j = g.rng.gen_range(0..family.len());
            family[j] += 1;
        }
    }

    let mut concrete = Vec::new();
    for (j, a) in abstract_events.iter().enumerate() {
        let mut base = a.clone();
        base.refines = Some(a.name.clone());
        if base.param && g.rng.gen_bool(0.3) {
            base.witness = Some(g.rng.gen_range(0..2));
        }
        if gated {
            base.guard.push(Atom::Cmp(Operand::H, "=", Operand::Lit(2)));
            if !base.actions.iter().any(|(t, _)| *t == Operand::H) {
                base.actions.push((Operand::H, Rhs::Lit(0)));
            }
        }
        let split = Atom::Cmp(Operand::Var(g.var()), "<", Operand::Lit(g.rng.gen_range(1..spec.domain_size)));
        for m in 0..family[j] {
            let mut ev = base.clone();
            ev.name = if m == 0 { a.name.clone() } else { format!("{}_{m}", a.name) };
            if family[j] > 1 {
                // First member takes the split half, the rest its complement.
                if m == 0 {
                    ev.guard.push(split.clone());
                } else {
                    ev.guard.push(Atom::Not(Box::new(split.clone())));
                }
            }
            if !clean && g.rng.gen_bool(0.35) {
                g.mutate(&mut ev);
            }
            concrete.push(ev);
        }
    }

    for i in 0..spec.n_skip_events {
        let ev = if i == 0 {
            Ev {
                name: "s0".into(),
                param: false,
                witness: None,
                choice: false,
                guard: Vec::new(),
                actions: vec![(Operand::H, Rhs::Inc)],
                refines: None,
            }
        } else {
            let cyclic = if spec.biased { 0.7 } else { 0.2 };
            let (guard, actions) = if g.rng.gen_bool(cyclic) {
                if g.rng.gen_bool(0.5) {
                    (vec![Atom::Cmp(Operand::H, "=", Operand::Lit(2))], vec![(Operand::H, Rhs::Lit(0))])
                } else {
                    (Vec::new(), vec![(Operand::H, Rhs::Dec)])
                }
            } else if !clean {
                let t = g.var();
                let r = g.rhs(t, false, false);
                (vec![Atom::Cmp(Operand::H, "=", Operand::Lit(1))], vec![(Operand::Var(t), r)])
            } else {
                (vec![Atom::Cmp(Operand::H, "=", Operand::Lit(1))], vec![(Operand::H, Rhs::Lit(2))])
            };
            Ev {
                name: format!("s{i}"),
                param: false,
                witness: None,
                choice: false,
                guard,
                actions,
                refines: None,
            }
        };
        concrete.push(ev);
    }

    (
        render("A", None, spec, &init, false, &abstract_events),
        render("C", Some("A"), spec, &init, h, &concrete),
    )
}

/// A random abstract machine and a concrete machine that refines it by
/// name. Deterministic in `spec`.
pub fn generate_machine_pair(spec: &RandomMachineSpec) -> (Machine, Machine) {
    let (a, c) = generate_sources(spec);
    let parse = |src: &str| parse_machine(src).unwrap_or_else(|e| panic!("generated machine does not parse: {e}\n{src}"));
    (parse(&a), parse(&c))
}

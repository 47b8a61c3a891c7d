//! Worked structures used by tests, acceptance checks and CLI examples.

use crate::graph::{Label, RootedForest};
use crate::structure::{AxiomMode, Builder, Qps};
use crate::taylor::ThickSubforest;

/// The two-root MELL structure with the green/blue/violet chain and the
/// gray root holding the red and orange boxes. Node ids: 0 green, 1 blue,
/// 2 violet, 3 gray, 4 red, 5 orange. Its violet axiom is on units, so it is
/// built in η mode.
pub fn two_root_boxes() -> Qps {
    let mut b = Builder::new(AxiomMode::Eta);
    let green = b.root();
    let blue = b.child(green);
    let violet = b.child(blue);
    let gray = b.root();
    let red = b.child(gray);
    let orange = b.child(gray);

    let axx = b.cell(Label::Ax, green, &[], &["X^", "X"]);
    let wbot = b.cell(Label::WhyNot, green, &[], &["?bot"]);
    let tens = b.cell(Label::Tensor, green, &["X", "?bot"], &["(X*?bot)"]);
    let woc = b.cell(Label::WhyNot, green, &[], &["?!1"]);
    let blue_door = b.cell(Label::OfCourse, green, &[], &["!1"]);
    let bot = b.cell(Label::Bot, blue, &[], &["bot"]);
    let one = b.cell(Label::One, blue, &[], &["1"]);
    let violet_door = b.cell(Label::OfCourse, blue, &[], &["!1"]);
    let axu = b.cell(Label::Ax, violet, &[], &["bot", "1"]);
    b.feed(bot, 0, wbot);
    b.feed(axu, 0, wbot);
    b.feed(axu, 1, violet_door);
    b.feed(violet_door, 0, woc);
    b.feed(one, 0, blue_door);
    b.feed(blue_door, 0, woc);
    b.wire(axx, 1, tens, 0);
    b.wire(wbot, 0, tens, 1);

    let axy = b.cell(Label::Ax, red, &[], &["Y", "Y^"]);
    let wy = b.cell(Label::WhyNot, red, &[], &["?Y"]);
    let par = b.cell(Label::Par, red, &["?Y", "Y^"], &["(?Y|Y^)"]);
    let red_door = b.cell(Label::OfCourse, gray, &[], &["!(?Y|Y^)"]);
    let one2 = b.cell(Label::One, orange, &[], &["1"]);
    let orange_door = b.cell(Label::OfCourse, gray, &[], &["!1"]);
    b.feed(axy, 0, wy);
    b.wire(wy, 0, par, 0);
    b.wire(axy, 1, par, 1);
    b.feed(par, 0, red_door);
    b.feed(one2, 0, orange_door);

    let tails = [b.out(axx, 0), b.out(tens, 0), b.out(woc, 0), b.out(red_door, 0), b.out(orange_door, 0)];
    b.conclude(&tails);
    b.finish()
}

/// Three blue copies holding one, zero and two violet copies; one red copy;
/// four orange copies.
pub fn example_subforest() -> ThickSubforest {
    let mut sigma = RootedForest::new();
    let mut h = vec![];
    let mut add = |parent: Option<usize>, node: usize, sigma: &mut RootedForest| {
        h.push(node);
        sigma.add(parent)
    };
    let g = add(None, 0, &mut sigma);
    for violets in [1, 0, 2] {
        let bl = add(Some(g), 1, &mut sigma);
        for _ in 0..violets {
            add(Some(bl), 2, &mut sigma);
        }
    }
    let gr = add(None, 3, &mut sigma);
    add(Some(gr), 4, &mut sigma);
    for _ in 0..4 {
        add(Some(gr), 5, &mut sigma);
    }
    ThickSubforest { sigma, h }
}

/// The resource structure obtained from [`two_root_boxes`] along [`example_subforest`],
/// built cell by cell.
pub fn two_root_element() -> Qps {
    let mut b = Builder::new(AxiomMode::Eta);
    let g = b.root();
    let k = b.root();
    let axx = b.cell(Label::Ax, g, &[], &["X^", "X"]);
    let wbot = b.cell(Label::WhyNot, g, &[], &["?bot"]);
    let tens = b.cell(Label::Tensor, g, &["X", "?bot"], &["(X*?bot)"]);
    let woc = b.cell(Label::WhyNot, g, &[], &["?!1"]);
    let blue_door = b.cell(Label::OfCourse, g, &[], &["!1"]);
    for violets in [1, 0, 2] {
        let bot = b.cell(Label::Bot, g, &[], &["bot"]);
        let one = b.cell(Label::One, g, &[], &["1"]);
        let vd = b.cell(Label::OfCourse, g, &[], &["!1"]);
        b.feed(bot, 0, wbot);
        b.feed(one, 0, blue_door);
        for _ in 0..violets {
            let axu = b.cell(Label::Ax, g, &[], &["bot", "1"]);
            b.feed(axu, 0, wbot);
            b.feed(axu, 1, vd);
        }
        b.feed(vd, 0, woc);
    }
    b.feed(blue_door, 0, woc);
    b.wire(axx, 1, tens, 0);
    b.wire(wbot, 0, tens, 1);

    let axy = b.cell(Label::Ax, k, &[], &["Y", "Y^"]);
    let wy = b.cell(Label::WhyNot, k, &[], &["?Y"]);
    let par = b.cell(Label::Par, k, &["?Y", "Y^"], &["(?Y|Y^)"]);
    let red_door = b.cell(Label::OfCourse, k, &[], &["!(?Y|Y^)"]);
    let orange_door = b.cell(Label::OfCourse, k, &[], &["!1"]);
    b.feed(axy, 0, wy);
    b.wire(wy, 0, par, 0);
    b.wire(axy, 1, par, 1);
    b.feed(par, 0, red_door);
    for _ in 0..4 {
        let one = b.cell(Label::One, k, &[], &["1"]);
        b.feed(one, 0, orange_door);
    }
    let tails = [b.out(axx, 0), b.out(tens, 0), b.out(woc, 0), b.out(red_door, 0), b.out(orange_door, 0)];
    b.conclude(&tails);
    b.finish()
}

/// The gray component with no red copy and two orange copies.
fn gray_two_orange() -> Qps {
    let mut b = Builder::new(AxiomMode::Eta);
    let k = b.root();
    let red_door = b.cell(Label::OfCourse, k, &[], &["!(?Y|Y^)"]);
    let orange_door = b.cell(Label::OfCourse, k, &[], &["!1"]);
    for _ in 0..2 {
        let one = b.cell(Label::One, k, &[], &["1"]);
        b.feed(one, 0, orange_door);
    }
    b.conclude(&[b.out(red_door, 0), b.out(orange_door, 0)]);
    b.finish()
}

/// A filled element of [`two_root_boxes`]: the green root is a single daimon.
pub fn two_root_emptying() -> Qps {
    let mut b = Builder::new(AxiomMode::Eta);
    let g = b.root();
    let dai = b.cell(Label::Daimon, g, &[], &["X^", "(X*?bot)", "?!1"]);
    b.conclude(&[b.out(dai, 0), b.out(dai, 1), b.out(dai, 2)]);
    b.finish().juxtapose(&gray_two_orange())
}

/// [`two_root_emptying`] with the `?!1` conclusion kept as a unary `?`-cell.
pub fn two_root_eta_emptying() -> Qps {
    let mut b = Builder::new(AxiomMode::Eta);
    let g = b.root();
    let dai = b.cell(Label::Daimon, g, &[], &["X^", "(X*?bot)", "!1"]);
    let w = b.cell(Label::WhyNot, g, &[], &["?!1"]);
    b.feed(dai, 2, w);
    b.conclude(&[b.out(dai, 0), b.out(dai, 1), b.out(w, 0)]);
    b.finish().juxtapose(&gray_two_orange())
}

/// One daimon per block, with the given output types.
pub fn daimons(blocks: &[&[&str]]) -> Qps {
    let mut b = Builder::new(AxiomMode::Atomic);
    let mut tails = vec![];
    for outs in blocks {
        let r = b.root();
        let d = b.cell(Label::Daimon, r, &[], outs);
        tails.extend((0..outs.len()).map(|k| b.out(d, k)));
    }
    b.conclude(&tails);
    b.finish()
}

/// A lone `1`-cell.
pub fn one_cell() -> Qps {
    let mut b = Builder::new(AxiomMode::Atomic);
    let r = b.root();
    let one = b.cell(Label::One, r, &[], &["1"]);
    b.conclude(&[b.out(one, 0)]);
    b.finish()
}

/// A `!`-cell with no input, of type `!X`.
pub fn empty_of_course() -> Qps {
    let mut b = Builder::new(AxiomMode::Atomic);
    let r = b.root();
    let oc = b.cell(Label::OfCourse, r, &[], &["!X"]);
    b.conclude(&[b.out(oc, 0)]);
    b.finish()
}

/// Copies of the coherence example: three `!1` and three `?bot` cells in one
/// block. `k` in `0..3` selects which `!`-cell has two `1` inputs; the
/// `?`-cell in the same slot has one `bot` input and the other two have two.
pub fn coherence_element(k: usize) -> Qps {
    let mut b = Builder::new(AxiomMode::Atomic);
    let r = b.root();
    let mut tails = vec![];
    for slot in 0..3 {
        let door = b.cell(Label::OfCourse, r, &[], &["!1"]);
        for _ in 0..if slot == k { 2 } else { 1 } {
            let one = b.cell(Label::One, r, &[], &["1"]);
            b.feed(one, 0, door);
        }
        tails.push(b.out(door, 0));
    }
    for slot in 0..3 {
        let w = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        for _ in 0..if slot == k { 1 } else { 2 } {
            let bot = b.cell(Label::Bot, r, &[], &["bot"]);
            b.feed(bot, 0, w);
        }
        tails.push(b.out(w, 0));
    }
    b.conclude(&tails);
    b.finish()
}

/// The deconstruction path of the nested-box example.
pub const NESTED_BOX_PATH: &str = "box@2 der@1 box@2 par@2 mix@1 ax@2 contr@1 der@2 mix@1 bot@2 der@1 bot@1";

/// The resource structure of the nested-box example: a `?`-cell and a
/// `!`-cell, both without inputs, in one block.
pub fn nested_box_element() -> Qps {
    let mut b = Builder::new(AxiomMode::Atomic);
    let r = b.root();
    let w = b.cell(Label::WhyNot, r, &[], &["??bot"]);
    let oc = b.cell(Label::OfCourse, r, &[], &["!!(A^|A)"]);
    b.conclude(&[b.out(w, 0), b.out(oc, 0)]);
    b.finish()
}

/// The sets reached after each step of [`NESTED_BOX_PATH`] from
/// `{nested_box_element()}`, in order; the last one is `{ε}`.
pub fn nested_box_resource_frames() -> Vec<Vec<Qps>> {
    let blocks: [&[&[&str]]; 11] = [
        &[&["??bot", "!(A^|A)"]],
        &[&["?bot", "!(A^|A)"]],
        &[&["?bot", "(A^|A)"]],
        &[&["?bot", "A^", "A"]],
        &[&["?bot"], &["A^", "A"]],
        &[&["?bot"]],
        &[&["?bot", "?bot"]],
        &[&["?bot", "bot"]],
        &[&["?bot"], &["bot"]],
        &[&["?bot"]],
        &[&["bot"]],
    ];
    let mut out: Vec<Vec<Qps>> = blocks.iter().map(|bs| vec![daimons(bs)]).collect();
    out.push(vec![Qps::empty(AxiomMode::Atomic)]);
    out
}

/// The MELL structures along [`NESTED_BOX_PATH`], the source first: two
/// nested boxes, the inner one holding an axiom under a par and two `bot`
/// cells feeding a `?`-cell of the outer box, itself under a `?`-cell of
/// the root. The last frame is ε.
pub fn nested_box_frames() -> Vec<Qps> {
    use crate::graph::NodeId;
    // The axiom and the two bots of the inner box, placed at `at`.
    fn inner(b: &mut Builder, at: NodeId) -> Vec<usize> {
        let ax = b.cell(Label::Ax, at, &[], &["A^", "A"]);
        let b1 = b.cell(Label::Bot, at, &[], &["bot"]);
        let b2 = b.cell(Label::Bot, at, &[], &["bot"]);
        vec![ax, b1, b2]
    }
    let mut frames = vec![];

    // Source: root { ??bot, door }, outer { ?bot, inner door }, inner { ax, par, bot, bot }.
    {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let outer = b.child(r);
        let inner_box = b.child(outer);
        let v = inner(&mut b, inner_box);
        let par = b.cell(Label::Par, inner_box, &["A^", "A"], &["(A^|A)"]);
        b.wire(v[0], 0, par, 0);
        b.wire(v[0], 1, par, 1);
        let w2 = b.cell(Label::WhyNot, outer, &[], &["?bot"]);
        b.feed(v[1], 0, w2);
        b.feed(v[2], 0, w2);
        let d2 = b.cell(Label::OfCourse, outer, &[], &["!(A^|A)"]);
        b.feed(par, 0, d2);
        let w1 = b.cell(Label::WhyNot, r, &[], &["??bot"]);
        b.feed(w2, 0, w1);
        let d1 = b.cell(Label::OfCourse, r, &[], &["!!(A^|A)"]);
        b.feed(d2, 0, d1);
        b.conclude(&[b.out(w1, 0), b.out(d1, 0)]);
        frames.push(b.finish());
    }
    // Outer box opened, then the root ?-cell derelicted.
    for derelicted in [false, true] {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let inner_box = b.child(r);
        let v = inner(&mut b, inner_box);
        let par = b.cell(Label::Par, inner_box, &["A^", "A"], &["(A^|A)"]);
        b.wire(v[0], 0, par, 0);
        b.wire(v[0], 1, par, 1);
        let w2 = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        b.feed(v[1], 0, w2);
        b.feed(v[2], 0, w2);
        let d2 = b.cell(Label::OfCourse, r, &[], &["!(A^|A)"]);
        b.feed(par, 0, d2);
        let first = if derelicted {
            b.out(w2, 0)
        } else {
            let w1 = b.cell(Label::WhyNot, r, &[], &["??bot"]);
            b.feed(w2, 0, w1);
            b.out(w1, 0)
        };
        b.conclude(&[first, b.out(d2, 0)]);
        frames.push(b.finish());
    }
    // Inner box opened, then the par removed.
    for par_removed in [false, true] {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let v = inner(&mut b, r);
        let w2 = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        b.feed(v[1], 0, w2);
        b.feed(v[2], 0, w2);
        if par_removed {
            b.conclude(&[b.out(w2, 0), b.out(v[0], 0), b.out(v[0], 1)]);
        } else {
            let par = b.cell(Label::Par, r, &["A^", "A"], &["(A^|A)"]);
            b.wire(v[0], 0, par, 0);
            b.wire(v[0], 1, par, 1);
            b.conclude(&[b.out(w2, 0), b.out(par, 0)]);
        }
        frames.push(b.finish());
    }
    // The ?-cell with its two bots, with the axiom in its own block, then alone.
    let two_bots = || {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let w = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        for _ in 0..2 {
            let bot = b.cell(Label::Bot, r, &[], &["bot"]);
            b.feed(bot, 0, w);
        }
        b.conclude(&[b.out(w, 0)]);
        b.finish()
    };
    let axiom = {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let ax = b.cell(Label::Ax, r, &[], &["A^", "A"]);
        b.conclude(&[b.out(ax, 0), b.out(ax, 1)]);
        b.finish()
    };
    frames.push(two_bots().juxtapose(&axiom));
    frames.push(two_bots());
    // After the contraction: two ?-cells with one bot each, in one block;
    // then the second one derelicted.
    for derelicted in [false, true] {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let w = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        let bot1 = b.cell(Label::Bot, r, &[], &["bot"]);
        b.feed(bot1, 0, w);
        let bot2 = b.cell(Label::Bot, r, &[], &["bot"]);
        let second = if derelicted {
            b.out(bot2, 0)
        } else {
            let w2 = b.cell(Label::WhyNot, r, &[], &["?bot"]);
            b.feed(bot2, 0, w2);
            b.out(w2, 0)
        };
        b.conclude(&[b.out(w, 0), second]);
        frames.push(b.finish());
    }
    let one_bot = || {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let w = b.cell(Label::WhyNot, r, &[], &["?bot"]);
        let bot = b.cell(Label::Bot, r, &[], &["bot"]);
        b.feed(bot, 0, w);
        b.conclude(&[b.out(w, 0)]);
        b.finish()
    };
    let bot = || {
        let mut b = Builder::new(AxiomMode::Atomic);
        let r = b.root();
        let c = b.cell(Label::Bot, r, &[], &["bot"]);
        b.conclude(&[b.out(c, 0)]);
        b.finish()
    };
    frames.push(one_bot().juxtapose(&bot()));
    frames.push(one_bot());
    frames.push(bot());
    frames.push(Qps::empty(AxiomMode::Atomic));
    frames
}

/// Two crossed axioms on `!A^` and `?A`, giving conclusions
/// `!A^, !A^, ?A, ?A` in one block. In η mode it is a valid structure whose
/// `?A` conclusions are not outputs of `?`-cells.
pub fn crossed_exponential_axioms() -> Qps {
    let mut b = Builder::new(AxiomMode::Eta);
    let r = b.root();
    let a1 = b.cell(Label::Ax, r, &[], &["!A^", "?A"]);
    let a2 = b.cell(Label::Ax, r, &[], &["!A^", "?A"]);
    b.conclude(&[b.out(a1, 0), b.out(a2, 0), b.out(a1, 1), b.out(a2, 1)]);
    b.finish()
}

#![allow(dead_code)]

use hetlab_core::Model;

pub fn reference() -> Model {
    Model::from_json(include_str!("../../../../specs/reference.json")).unwrap()
}

pub fn reference_fzeta() -> Model {
    Model::from_json(include_str!("../../../../specs/reference_fzeta.json")).unwrap()
}

pub fn case2() -> Model {
    Model::from_json(include_str!("../../../../specs/case2.json")).unwrap()
}

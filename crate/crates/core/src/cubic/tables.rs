//! Classical invariants of the ternary cubic as sparse coefficient products.
//! Indices refer to the monomial order `x^3, x^2y, x^2z, xy^2, xyz, xz^2, y^3, y^2z, yz^2, z^3`.

pub(crate) const C4_TERMS: [(i64, [u8; 4]); 25] = [
    (144, [0, 3, 7, 9]),
    (-48, [0, 3, 8, 8]),
    (-216, [0, 4, 6, 9]),
    (24, [0, 4, 7, 8]),
    (144, [0, 5, 6, 8]),
    (-48, [0, 5, 7, 7]),
    (-48, [1, 1, 7, 9]),
    (16, [1, 1, 8, 8]),
    (144, [1, 2, 6, 9]),
    (-16, [1, 2, 7, 8]),
    (24, [1, 3, 4, 9]),
    (-16, [1, 3, 5, 8]),
    (-8, [1, 4, 4, 8]),
    (24, [1, 4, 5, 7]),
    (-48, [1, 5, 5, 6]),
    (-48, [2, 2, 6, 8]),
    (16, [2, 2, 7, 7]),
    (-48, [2, 3, 3, 9]),
    (24, [2, 3, 4, 8]),
    (-16, [2, 3, 5, 7]),
    (-8, [2, 4, 4, 7]),
    (24, [2, 4, 5, 6]),
    (16, [3, 3, 5, 5]),
    (-8, [3, 4, 4, 5]),
    (1, [4, 4, 4, 4]),
];

pub(crate) const C6_TERMS: [(i64, [u8; 6]); 103] = [
    (5832, [0, 0, 6, 6, 9, 9]),
    (-3888, [0, 0, 6, 7, 8, 9]),
    (864, [0, 0, 6, 8, 8, 8]),
    (864, [0, 0, 7, 7, 7, 9]),
    (-216, [0, 0, 7, 7, 8, 8]),
    (-3888, [0, 1, 3, 6, 9, 9]),
    (1296, [0, 1, 3, 7, 8, 9]),
    (-288, [0, 1, 3, 8, 8, 8]),
    (1296, [0, 1, 4, 6, 8, 9]),
    (-864, [0, 1, 4, 7, 7, 9]),
    (144, [0, 1, 4, 7, 8, 8]),
    (1296, [0, 1, 5, 6, 7, 9]),
    (-864, [0, 1, 5, 6, 8, 8]),
    (144, [0, 1, 5, 7, 7, 8]),
    (1296, [0, 2, 3, 6, 8, 9]),
    (-864, [0, 2, 3, 7, 7, 9]),
    (144, [0, 2, 3, 7, 8, 8]),
    (1296, [0, 2, 4, 6, 7, 9]),
    (-864, [0, 2, 4, 6, 8, 8]),
    (144, [0, 2, 4, 7, 7, 8]),
    (-3888, [0, 2, 5, 6, 6, 9]),
    (1296, [0, 2, 5, 6, 7, 8]),
    (-288, [0, 2, 5, 7, 7, 7]),
    (864, [0, 3, 3, 3, 9, 9]),
    (-864, [0, 3, 3, 4, 8, 9]),
    (-864, [0, 3, 3, 5, 7, 9]),
    (576, [0, 3, 3, 5, 8, 8]),
    (648, [0, 3, 4, 4, 7, 9]),
    (72, [0, 3, 4, 4, 8, 8]),
    (1296, [0, 3, 4, 5, 6, 9]),
    (-720, [0, 3, 4, 5, 7, 8]),
    (-864, [0, 3, 5, 5, 6, 8]),
    (576, [0, 3, 5, 5, 7, 7]),
    (-540, [0, 4, 4, 4, 6, 9]),
    (-36, [0, 4, 4, 4, 7, 8]),
    (648, [0, 4, 4, 5, 6, 8]),
    (72, [0, 4, 4, 5, 7, 7]),
    (-864, [0, 4, 5, 5, 6, 7]),
    (864, [0, 5, 5, 5, 6, 6]),
    (864, [1, 1, 1, 6, 9, 9]),
    (-288, [1, 1, 1, 7, 8, 9]),
    (64, [1, 1, 1, 8, 8, 8]),
    (-864, [1, 1, 2, 6, 8, 9]),
    (576, [1, 1, 2, 7, 7, 9]),
    (-96, [1, 1, 2, 7, 8, 8]),
    (-216, [1, 1, 3, 3, 9, 9]),
    (144, [1, 1, 3, 4, 8, 9]),
    (144, [1, 1, 3, 5, 7, 9]),
    (-96, [1, 1, 3, 5, 8, 8]),
    (72, [1, 1, 4, 4, 7, 9]),
    (-48, [1, 1, 4, 4, 8, 8]),
    (-864, [1, 1, 4, 5, 6, 9]),
    (144, [1, 1, 4, 5, 7, 8]),
    (576, [1, 1, 5, 5, 6, 8]),
    (-216, [1, 1, 5, 5, 7, 7]),
    (-864, [1, 2, 2, 6, 7, 9]),
    (576, [1, 2, 2, 6, 8, 8]),
    (-96, [1, 2, 2, 7, 7, 8]),
    (144, [1, 2, 3, 3, 8, 9]),
    (-720, [1, 2, 3, 4, 7, 9]),
    (144, [1, 2, 3, 4, 8, 8]),
    (1296, [1, 2, 3, 5, 6, 9]),
    (-48, [1, 2, 3, 5, 7, 8]),
    (648, [1, 2, 4, 4, 6, 9]),
    (-24, [1, 2, 4, 4, 7, 8]),
    (-720, [1, 2, 4, 5, 6, 8]),
    (144, [1, 2, 4, 5, 7, 7]),
    (144, [1, 2, 5, 5, 6, 7]),
    (144, [1, 3, 3, 4, 5, 9]),
    (-96, [1, 3, 3, 5, 5, 8]),
    (-36, [1, 3, 4, 4, 4, 9]),
    (-24, [1, 3, 4, 4, 5, 8]),
    (144, [1, 3, 4, 5, 5, 7]),
    (-288, [1, 3, 5, 5, 5, 6]),
    (12, [1, 4, 4, 4, 4, 8]),
    (-36, [1, 4, 4, 4, 5, 7]),
    (72, [1, 4, 4, 5, 5, 6]),
    (864, [2, 2, 2, 6, 6, 9]),
    (-288, [2, 2, 2, 6, 7, 8]),
    (64, [2, 2, 2, 7, 7, 7]),
    (576, [2, 2, 3, 3, 7, 9]),
    (-216, [2, 2, 3, 3, 8, 8]),
    (-864, [2, 2, 3, 4, 6, 9]),
    (144, [2, 2, 3, 4, 7, 8]),
    (144, [2, 2, 3, 5, 6, 8]),
    (-96, [2, 2, 3, 5, 7, 7]),
    (72, [2, 2, 4, 4, 6, 8]),
    (-48, [2, 2, 4, 4, 7, 7]),
    (144, [2, 2, 4, 5, 6, 7]),
    (-216, [2, 2, 5, 5, 6, 6]),
    (-288, [2, 3, 3, 3, 5, 9]),
    (72, [2, 3, 3, 4, 4, 9]),
    (144, [2, 3, 3, 4, 5, 8]),
    (-96, [2, 3, 3, 5, 5, 7]),
    (-36, [2, 3, 4, 4, 4, 8]),
    (-24, [2, 3, 4, 4, 5, 7]),
    (144, [2, 3, 4, 5, 5, 6]),
    (12, [2, 4, 4, 4, 4, 7]),
    (-36, [2, 4, 4, 4, 5, 6]),
    (64, [3, 3, 3, 5, 5, 5]),
    (-48, [3, 3, 4, 4, 5, 5]),
    (12, [3, 4, 4, 4, 4, 5]),
    (-1, [4, 4, 4, 4, 4, 4]),
];

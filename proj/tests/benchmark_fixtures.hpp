#pragma once

// Reference UCIQE benchmark grid: six enhancement models, each trained on
// five datasets and scored on three test sets. Totals and component
// decompositions are the published four-decimal values; the suites check
// that component recombination and win counting reproduce them.

#include <array>
#include <string_view>

namespace fixtures {

inline constexpr std::array<std::string_view, 6> kModels = {
    "UWCNN", "UIEC2Net", "WaterNet", "Ushape", "DMunderwater", "WF-Diff"};
inline constexpr std::array<std::string_view, 5> kTrainingSets = {
    "UIEB", "LSUI", "EUVP", "UWImgNetSD", "UWNature"};
inline constexpr std::array<std::string_view, 3> kTestSets = {
    "U45", "RUIE", "LSUI&EUVP"};

struct GridRow {
    int model;
    int training_set;
    std::array<double, 3> total;   // per test set
    std::array<double, 3> sigma_c;
    std::array<double, 3> conl;
    std::array<double, 3> mu_s;
};

inline constexpr std::array<GridRow, 30> kGrid = {{
    {0, 0, {0.5514, 0.5115, 0.5732}, {0.2622, 0.1844, 0.2628}, {0.8021, 0.7584, 0.8596}, {0.8094, 0.8425, 0.8317}},
    {0, 1, {0.5390, 0.5113, 0.5773}, {0.2489, 0.1944, 0.2692}, {0.7843, 0.7844, 0.8677}, {0.8045, 0.7957, 0.8273}},
    {0, 2, {0.5369, 0.5177, 0.5745}, {0.2666, 0.2128, 0.2769}, {0.7380, 0.7355, 0.8324}, {0.8135, 0.8394, 0.8404}},
    {0, 3, {0.5612, 0.5493, 0.5979}, {0.2957, 0.2555, 0.3053}, {0.7641, 0.7689, 0.8557}, {0.8269, 0.8488, 0.8544}},
    {0, 4, {0.5485, 0.5213, 0.5798}, {0.2904, 0.2192, 0.2904}, {0.7236, 0.7278, 0.8141}, {0.8307, 0.8498, 0.8556}},
    {1, 0, {0.6172, 0.5726, 0.6121}, {0.3346, 0.2661, 0.3064}, {0.9122, 0.8841, 0.9342}, {0.8161, 0.7972, 0.8238}},
    {1, 1, {0.5785, 0.5554, 0.5835}, {0.2730, 0.2383, 0.2636}, {0.8480, 0.8501, 0.8815}, {0.8460, 0.8172, 0.8470}},
    {1, 2, {0.5302, 0.4960, 0.5745}, {0.2599, 0.2031, 0.2661}, {0.7123, 0.6869, 0.8474}, {0.8268, 0.8245, 0.8438}},
    {1, 3, {0.5989, 0.5796, 0.6310}, {0.2993, 0.2551, 0.3252}, {0.8868, 0.8795, 0.9450}, {0.8362, 0.8494, 0.8516}},
    {1, 4, {0.5810, 0.5480, 0.6035}, {0.2721, 0.2175, 0.2919}, {0.8431, 0.8429, 0.8891}, {0.8628, 0.8340, 0.8648}},
    {2, 0, {0.5480, 0.5154, 0.5756}, {0.2564, 0.1847, 0.2618}, {0.8011, 0.7817, 0.8777}, {0.8077, 0.8324, 0.8237}},
    {2, 1, {0.5315, 0.5116, 0.5689}, {0.2524, 0.1999, 0.2640}, {0.7344, 0.7375, 0.8275}, {0.8223, 0.8370, 0.8470}},
    {2, 2, {0.5353, 0.5181, 0.5722}, {0.2672, 0.2097, 0.2775}, {0.7332, 0.7460, 0.8227}, {0.8111, 0.8353, 0.8405}},
    {2, 3, {0.5549, 0.5412, 0.5958}, {0.2778, 0.2405, 0.2868}, {0.7585, 0.7413, 0.8771}, {0.8411, 0.8741, 0.8572}},
    {2, 4, {0.5730, 0.5416, 0.5897}, {0.3105, 0.2397, 0.2988}, {0.7690, 0.7666, 0.8332}, {0.8408, 0.8503, 0.8585}},
    {3, 0, {0.5964, 0.5529, 0.6012}, {0.3257, 0.2602, 0.3070}, {0.8669, 0.8241, 0.9010}, {0.7999, 0.7956, 0.8160}},
    {3, 1, {0.5654, 0.5489, 0.5861}, {0.2804, 0.2449, 0.2827}, {0.8287, 0.8583, 0.8916}, {0.8026, 0.7715, 0.8117}},
    {3, 2, {0.5136, 0.5159, 0.5638}, {0.2421, 0.2184, 0.2711}, {0.7042, 0.7291, 0.8086}, {0.8037, 0.8289, 0.8345}},
    {3, 3, {0.5833, 0.5641, 0.6250}, {0.3129, 0.2566, 0.3281}, {0.8060, 0.8025, 0.9083}, {0.8370, 0.8685, 0.8620}},
    {3, 4, {0.5734, 0.5517, 0.6017}, {0.3225, 0.2707, 0.3385}, {0.7638, 0.7576, 0.8221}, {0.8259, 0.8424, 0.8446}},
    {4, 0, {0.5854, 0.5430, 0.5802}, {0.3037, 0.2372, 0.2831}, {0.8953, 0.8645, 0.9066}, {0.7668, 0.7556, 0.7718}},
    {4, 1, {0.5827, 0.5700, 0.5853}, {0.2862, 0.2592, 0.2913}, {0.8546, 0.8759, 0.8553}, {0.8313, 0.8085, 0.8316}},
    {4, 2, {0.5124, 0.5020, 0.5650}, {0.2385, 0.2034, 0.2682}, {0.7069, 0.7174, 0.8220}, {0.8025, 0.8148, 0.8301}},
    {4, 3, {0.5957, 0.5710, 0.6131}, {0.3271, 0.2755, 0.3371}, {0.8355, 0.8193, 0.8722}, {0.8280, 0.8431, 0.8379}},
    {4, 4, {0.5667, 0.5270, 0.5887}, {0.3031, 0.2247, 0.3100}, {0.7706, 0.7496, 0.8230}, {0.8279, 0.8386, 0.8451}},
    {5, 0, {0.6026, 0.5552, 0.6038}, {0.3330, 0.2605, 0.3106}, {0.8438, 0.7783, 0.8708}, {0.8349, 0.8527, 0.8518}},
    {5, 1, {0.5786, 0.5687, 0.5869}, {0.2909, 0.2677, 0.2926}, {0.8274, 0.8535, 0.8534}, {0.8360, 0.8118, 0.8371}},
    {5, 2, {0.5332, 0.5083, 0.5725}, {0.2616, 0.1909, 0.2765}, {0.7295, 0.7432, 0.8208}, {0.8171, 0.8342, 0.8455}},
    {5, 3, {0.5931, 0.5662, 0.6120}, {0.3400, 0.2788, 0.3413}, {0.7952, 0.7855, 0.8514}, {0.8374, 0.8543, 0.8486}},
    {5, 4, {0.5761, 0.5369, 0.5998}, {0.3122, 0.2432, 0.3286}, {0.7811, 0.7459, 0.8229}, {0.8366, 0.8477, 0.8545}},
}};

// Groups of (model, test set) won by either synthetic training set.
inline constexpr int kExpectedSyntheticWins = 14;

} // namespace fixtures

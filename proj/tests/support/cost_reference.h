#pragma once

// Cost per rider ($) for rates 20..100 step 5 (rows); columns are riders
// 89, 182, 270 each with fleets 5, 6, 7. Reference values for the demo cost grid.

#include <array>

namespace cost_ref {

inline constexpr std::array<int, 3> kRiders{89, 182, 270};
inline constexpr std::array<int, 3> kFleets{5, 6, 7};

struct Row {
  double rate;
  std::array<double, 9> cost;
};

inline constexpr std::array<Row, 17> kRows{{
    {20, {14.61, 17.53, 20.45, 7.14, 8.57, 10.00, 4.81, 5.78, 6.74}},
    {25, {18.26, 21.91, 25.56, 8.93, 10.71, 12.50, 6.02, 7.22, 8.43}},
    {30, {21.91, 26.29, 30.67, 10.71, 12.86, 15.00, 7.22, 8.67, 10.11}},
    {35, {25.56, 30.67, 35.79, 12.50, 15.00, 17.50, 8.43, 10.11, 11.80}},
    {40, {29.21, 35.06, 40.90, 14.29, 17.14, 20.00, 9.63, 11.56, 13.48}},
    {45, {32.87, 39.44, 46.01, 16.07, 19.29, 22.50, 10.83, 13.00, 15.17}},
    {50, {36.52, 43.82, 51.12, 17.86, 21.43, 25.00, 12.04, 14.44, 16.85}},
    {55, {40.17, 48.20, 56.24, 19.64, 23.57, 27.50, 13.24, 15.89, 18.54}},
    {60, {43.82, 52.58, 61.35, 21.43, 25.71, 30.00, 14.44, 17.33, 20.22}},
    {65, {47.47, 56.97, 66.46, 23.21, 27.86, 32.50, 15.65, 18.78, 21.91}},
    {70, {51.12, 61.35, 71.57, 25.00, 30.00, 35.00, 16.85, 20.22, 23.59}},
    {75, {54.78, 65.73, 76.69, 26.79, 32.14, 37.50, 18.06, 21.67, 25.28}},
    {80, {58.43, 70.11, 81.80, 28.57, 34.29, 40.00, 19.26, 23.11, 26.96}},
    {85, {62.08, 74.49, 86.91, 30.36, 36.43, 42.50, 20.46, 24.56, 28.65}},
    {90, {65.73, 78.88, 92.02, 32.14, 38.57, 45.00, 21.67, 26.00, 30.33}},
    {95, {69.38, 83.26, 97.13, 33.93, 40.71, 47.50, 22.87, 27.44, 32.02}},
    {100, {73.03, 87.64, 102.25, 35.71, 42.86, 50.00, 24.07, 28.89, 33.70}},
}};

}  // namespace cost_ref
